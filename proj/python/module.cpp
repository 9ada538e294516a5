// Python bindings for the cavity-resistance core. Exposes the main
// operations (shape construction, tracing, resistance estimators, census,
// optimization, constants) with dict-shaped results.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

#include "cavres/analysis.hpp"
#include "cavres/billiard.hpp"
#include "cavres/optimizer.hpp"
#include "cavres/resistance.hpp"
#include "cavres/shapes.hpp"
#include "cavres/version.hpp"

namespace py = pybind11;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

cavres::Cavity shape_from_text(const std::string& text) {
    if (text == "flat") return cavres::flat();
    if (text == "double_parabola") return cavres::double_parabola();
    if (text == "triangle_notch") return cavres::triangle_notch();
    if (text.rfind("rect_notch:", 0) == 0) {
        return cavres::rect_notch(std::stod(text.substr(11)));
    }
    return cavres::build_cavity(cavres::parse_shape_spec(text));
}

py::dict estimate_dict(const cavres::ResistanceEstimate& est) {
    py::dict d;
    d["value"] = est.value;
    d["rule"] = est.rule;
    if (est.rule == "monte_carlo") {
        d["n_samples"] = est.n_samples;
        d["seed"] = est.seed;
        d["std_error"] = est.std_error.value_or(0.0);
    } else {
        d["n_x"] = est.n_x;
        d["n_phi"] = est.n_phi;
    }
    d["corner_hits"] = est.corner_hits;
    return d;
}

py::dict grid_dict(const cavres::Grid2D& grid) {
    py::dict d;
    d["x"] = grid.xs;
    d["phi"] = grid.phis;
    py::list rows;
    for (std::size_t k = 0; k < grid.phis.size(); ++k) {
        py::list row;
        for (std::size_t i = 0; i < grid.xs.size(); ++i) {
            row.append(grid.at(k, i));
        }
        rows.append(row);
    }
    d["values"] = rows;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Billiard cavity resistance core";
    m.attr("__version__") = cavres::kVersion;

    py::class_<cavres::Cavity>(m, "Cavity")
        .def("__repr__",
             [](const cavres::Cavity& c) {
                 return "<Cavity " + cavres::shape_name(c.descriptor) + ">";
             })
        .def_property_readonly("spec", [](const cavres::Cavity& c) {
            return cavres::emit_shape_spec(c.descriptor);
        });

    py::register_exception<cavres::InvalidShapeError>(m, "InvalidShapeError",
                                                      PyExc_ValueError);
    py::register_exception<cavres::ParseError>(m, "ParseError",
                                               PyExc_ValueError);
    py::register_exception<cavres::TraceError>(m, "TraceError",
                                               PyExc_RuntimeError);

    m.def("shape", &shape_from_text,
          "Build a cavity from an alias (flat, double_parabola, "
          "triangle_notch, rect_notch:<depth>) or a JSON shape spec",
          py::arg("text"));
    m.def("flat", &cavres::flat);
    m.def("double_parabola", &cavres::double_parabola);
    m.def("triangle_notch", &cavres::triangle_notch);
    m.def("rect_notch", &cavres::rect_notch, py::arg("depth"));
    m.def("quadratic_cavity", &cavres::quadratic_cavity, py::arg("h"),
          py::arg("beta"));
    m.def(
        "polyline_cavity",
        [](const std::vector<std::pair<double, double>>& pts) {
            std::vector<cavres::Vec2> v;
            for (const auto& [x, y] : pts) v.push_back({x, y});
            return cavres::polyline_cavity(v);
        },
        py::arg("points"));

    m.def(
        "trace",
        [](const cavres::Cavity& cavity, double x, double phi_deg,
           int max_reflections) {
            const cavres::TrajectoryResult r = cavres::trace(
                cavity, {x, phi_deg / kDeg}, max_reflections);
            py::dict d;
            d["nc"] = r.nc;
            d["exit_x"] = r.exit_x;
            d["exit_phi_deg"] = r.exit_phi * kDeg;
            d["y_max"] = r.y_max;
            d["corner_hit"] = r.corner_hit;
            py::list pts;
            for (const cavres::Reflection& refl : r.reflections) {
                pts.append(py::make_tuple(refl.point.x, refl.point.y));
            }
            d["reflections"] = pts;
            return d;
        },
        py::arg("cavity"), py::arg("x"), py::arg("phi_deg"),
        py::arg("max_reflections") = 1000);

    m.def(
        "resistance",
        [](const cavres::Cavity& cavity, int n_x, int n_phi,
           const std::string& rule, int threads) {
            cavres::QuadratureConfig cfg;
            cfg.n_x = n_x;
            cfg.n_phi = n_phi;
            cfg.threads = threads;
            if (rule == "midpoint") {
                return estimate_dict(cavres::resistance_quadrature(cavity, cfg));
            }
            if (rule == "simpson") {
                return estimate_dict(cavres::resistance_simpson(cavity, cfg));
            }
            throw py::value_error("rule must be midpoint or simpson");
        },
        py::arg("cavity"), py::arg("n_x") = 1000, py::arg("n_phi") = 1000,
        py::arg("rule") = "midpoint", py::arg("threads") = 0);

    m.def(
        "resistance_mc",
        [](const cavres::Cavity& cavity, long long n, std::uint64_t seed,
           int threads) {
            return estimate_dict(
                cavres::resistance_monte_carlo(cavity, n, seed, threads));
        },
        py::arg("cavity"), py::arg("n"), py::arg("seed") = 1,
        py::arg("threads") = 0);

    m.def("perimeter_ratio", &cavres::perimeter_ratio, py::arg("n"));

    m.def(
        "body_resistance",
        [](const std::vector<std::pair<double, double>>& pieces,
           double smooth_fraction, double eps_over_r) {
            cavres::BodySpec spec;
            spec.eps_over_r = eps_over_r;
            spec.smooth_fraction = smooth_fraction;
            for (const auto& [fraction, resistance] : pieces) {
                spec.pieces.push_back({"piece", fraction, resistance});
            }
            return cavres::body_resistance(spec);
        },
        py::arg("pieces"), py::arg("smooth_fraction") = 0.0,
        py::arg("eps_over_r") = 0.0,
        "pieces: list of (aperture_fraction, resistance) pairs");

    m.def(
        "census",
        [](const cavres::Cavity& cavity, long long n, std::uint64_t seed,
           int threads) {
            const cavres::CensusReport rep =
                cavres::census(cavity, n, seed, threads);
            py::dict d;
            d["n_samples"] = rep.n_samples;
            d["seed"] = rep.seed;
            py::dict hist;
            for (const auto& [nc, count] : rep.nc_histogram) {
                hist[py::int_(nc)] = count;
            }
            d["nc_histogram"] = hist;
            py::dict v;
            v["thm1"] = rep.violations.thm1;
            v["thm2"] = rep.violations.thm2;
            v["corollary"] = rep.violations.corollary;
            d["violations"] = v;
            py::dict dev;
            for (const auto& [nc, rad] : rep.max_abs_dev_by_nc) {
                dev[py::int_(nc)] = rad * kDeg;
            }
            d["max_abs_dev_deg_by_nc"] = dev;
            d["corner_hits"] = rep.corner_hits;
            d["errors"] = rep.errors;
            return d;
        },
        py::arg("cavity"), py::arg("n"), py::arg("seed") = 42,
        py::arg("threads") = 0);

    m.def(
        "integrand_grid",
        [](const cavres::Cavity& cavity, int n_x, int n_phi, int threads) {
            cavres::QuadratureConfig cfg;
            cfg.n_x = n_x;
            cfg.n_phi = n_phi;
            cfg.threads = threads;
            return grid_dict(cavres::integrand_grid(cavity, cfg));
        },
        py::arg("cavity"), py::arg("n_x") = 100, py::arg("n_phi") = 100,
        py::arg("threads") = 0);

    m.def(
        "deviation_grid",
        [](const cavres::Cavity& cavity, int n_x, int n_phi, int threads) {
            cavres::QuadratureConfig cfg;
            cfg.n_x = n_x;
            cfg.n_phi = n_phi;
            cfg.threads = threads;
            return grid_dict(cavres::deviation_grid(cavity, cfg));
        },
        py::arg("cavity"), py::arg("n_x") = 100, py::arg("n_phi") = 100,
        py::arg("threads") = 0);

    m.def("constants", [] {
        const cavres::TheoremConstants c = cavres::constants();
        py::dict d;
        d["phi0"] = c.phi0;
        d["two_phi0"] = c.two_phi0;
        d["phi0_deg"] = c.phi0 * kDeg;
        d["y1_star"] = c.y1_star;
        d["y2_star"] = c.y2_star;
        d["y3_star"] = c.y3_star;
        d["y4_star"] = c.y4_star;
        return d;
    });

    m.def(
        "optimize_quadratic",
        [](int budget, int multistart, std::uint64_t seed, int grid_n,
           int rescore_n, double tol, int threads) {
            cavres::FamilyOptConfig cfg;
            cfg.settings.budget = budget;
            cfg.settings.tol = tol;
            cfg.grid_n = grid_n;
            cfg.rescore_grid_n = rescore_n;
            cfg.multistart = multistart;
            cfg.seed = seed;
            cfg.threads = threads;
            const cavres::FamilyOptResult r =
                cavres::optimize_family(cavres::SearchSpace::quadratic(), cfg);
            py::dict d;
            d["best_params"] = r.best.best_params;
            d["best_value"] = r.best.best_value;
            d["rescored_value"] = r.rescored_value;
            d["method"] = r.best.method;
            d["runs"] = r.runs.size();
            return d;
        },
        py::arg("budget") = 400, py::arg("multistart") = 8, py::arg("seed") = 7,
        py::arg("grid_n") = 500, py::arg("rescore_n") = 2000,
        py::arg("tol") = 1e-4, py::arg("threads") = 0);
}
