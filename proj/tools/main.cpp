// cavres: resistance, shape optimization, and trajectory census for 2D
// billiard cavities. Subcommands: resist, optimize, census, grid, trace.
//
// Exit codes: 0 success, 2 argument/shape parse error, 3 trace failure,
// 1 anything else.

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavres/analysis.hpp"
#include "cavres/billiard.hpp"
#include "cavres/optimizer.hpp"
#include "cavres/resistance.hpp"
#include "cavres/shapes.hpp"
#include "cavres/version.hpp"

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

cavres::ShapeSpec load_shape_spec(const std::string& arg) {
    if (arg == "flat") return cavres::FlatSpec{};
    if (arg == "double_parabola") return cavres::DoubleParabolaSpec{};
    if (arg == "triangle_notch") return cavres::TriangleNotchSpec{};
    if (arg.rfind("rect_notch:", 0) == 0) {
        const std::string depth_str = arg.substr(std::string("rect_notch:").size());
        try {
            std::size_t pos = 0;
            const double depth = std::stod(depth_str, &pos);
            if (pos != depth_str.size()) throw std::invalid_argument(depth_str);
            return cavres::RectNotchSpec{depth};
        } catch (const std::exception&) {
            throw cavres::ParseError("rect_notch alias: bad depth \"" +
                                     depth_str + "\"");
        }
    }
    if (!arg.empty() && arg.front() == '{') {
        return cavres::parse_shape_spec(arg);
    }
    std::ifstream in(arg);
    if (!in) {
        throw cavres::ParseError("cannot open shape spec file: " + arg);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return cavres::parse_shape_spec(text.str());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

// Every file-producing run gets a manifest alongside: re-running the same
// tool version with the recorded params reproduces the outputs byte for byte.
void write_manifest(const std::string& base, const std::string& subcommand,
                    const nlohmann::json& params,
                    const std::vector<std::string>& outputs) {
    nlohmann::json m;
    m["tool"] = "cavres";
    m["version"] = cavres::kVersion;
    m["subcommand"] = subcommand;
    m["params"] = params;
    m["outputs"] = outputs;
    write_file(base + ".manifest.json", m.dump(2) + "\n");
}

struct ResistArgs {
    std::string shape;
    int nx = 1000;
    int nphi = 1000;
    std::string rule = "midpoint";
    long long mc_samples = 0;
    std::uint64_t seed = 1;
    int threads = 0;
    int max_reflections = cavres::kIntegralMaxReflections;
    std::string out;
};

int run_resist(const ResistArgs& a) {
    const cavres::ShapeSpec spec = load_shape_spec(a.shape);
    const cavres::Cavity cavity = cavres::build_cavity(spec);
    cavres::ResistanceEstimate est;
    if (a.mc_samples > 0) {
        est = cavres::resistance_monte_carlo(cavity, a.mc_samples, a.seed,
                                             a.threads, a.max_reflections);
    } else {
        cavres::QuadratureConfig cfg;
        cfg.n_x = a.nx;
        cfg.n_phi = a.nphi;
        cfg.threads = a.threads;
        cfg.max_reflections = a.max_reflections;
        if (a.rule == "midpoint") {
            cfg.rule = cavres::QuadRule::Midpoint;
            est = cavres::resistance_quadrature(cavity, cfg);
        } else if (a.rule == "simpson") {
            cfg.rule = cavres::QuadRule::SimpsonPhi;
            est = cavres::resistance_simpson(cavity, cfg);
        } else {
            throw cavres::ParseError("unknown rule: " + a.rule);
        }
    }
    const std::string json = cavres::estimate_to_json(est);
    std::cout << json << "\n";
    if (!a.out.empty()) {
        write_file(a.out, json + "\n");
        nlohmann::json params;
        params["shape"] = cavres::emit_shape_spec(spec);
        params["rule"] = est.rule;
        params["n_x"] = a.nx;
        params["n_phi"] = a.nphi;
        params["mc_samples"] = a.mc_samples;
        params["seed"] = a.seed;
        write_manifest(a.out, "resist", params, {a.out});
    }
    return 0;
}

struct OptimizeArgs {
    std::string family = "quadratic";
    int k = 2;
    std::vector<std::string> bounds;
    int budget = 400;
    int multistart = 8;
    std::uint64_t seed = 7;
    double tol = 1e-4;
    int grid_n = 500;
    int rescore_n = 2000;
    int threads = 0;
    std::string out;
};

int run_optimize(const OptimizeArgs& a) {
    cavres::SearchSpace space;
    if (a.family == "quadratic") {
        space = cavres::SearchSpace::quadratic();
    } else if (a.family == "polyline") {
        space = cavres::SearchSpace::polyline(a.k);
    } else {
        throw cavres::ParseError("unknown family: " + a.family);
    }
    if (!a.bounds.empty()) {
        if (a.bounds.size() != space.bounds.size()) {
            throw cavres::ParseError("expected " +
                                     std::to_string(space.bounds.size()) +
                                     " --bounds entries");
        }
        for (std::size_t j = 0; j < a.bounds.size(); ++j) {
            const auto colon = a.bounds[j].find(':');
            if (colon == std::string::npos) {
                throw cavres::ParseError("bounds must be lo:hi, got \"" +
                                         a.bounds[j] + "\"");
            }
            try {
                space.bounds[j].lo = std::stod(a.bounds[j].substr(0, colon));
                space.bounds[j].hi = std::stod(a.bounds[j].substr(colon + 1));
            } catch (const std::exception&) {
                throw cavres::ParseError("bounds must be lo:hi, got \"" +
                                         a.bounds[j] + "\"");
            }
        }
    }
    cavres::FamilyOptConfig cfg;
    cfg.settings.budget = a.budget;
    cfg.settings.tol = a.tol;
    cfg.grid_n = a.grid_n;
    cfg.rescore_grid_n = a.rescore_n;
    cfg.multistart = a.multistart;
    cfg.seed = a.seed;
    cfg.threads = a.threads;

    const cavres::FamilyOptResult result = cavres::optimize_family(space, cfg);
    const std::string json = cavres::family_result_to_json(result);
    std::cout << json << "\n";
    if (!a.out.empty()) {
        write_file(a.out, json + "\n");
        nlohmann::json params;
        params["family"] = a.family;
        params["k"] = a.k;
        params["budget"] = a.budget;
        params["multistart"] = a.multistart;
        params["seed"] = a.seed;
        params["tol"] = a.tol;
        params["grid_n"] = a.grid_n;
        params["rescore_n"] = a.rescore_n;
        write_manifest(a.out, "optimize", params, {a.out});
    }
    return 0;
}

struct CensusArgs {
    std::string shape;
    long long n = 10000;
    std::uint64_t seed = 42;
    int threads = 0;
    bool scatter = false;
    std::string out;
};

int run_census(const CensusArgs& a) {
    const cavres::ShapeSpec spec = load_shape_spec(a.shape);
    const cavres::Cavity cavity = cavres::build_cavity(spec);
    const cavres::CensusReport report =
        cavres::census(cavity, a.n, a.seed, a.threads);
    const std::string aggregate = cavres::census_aggregate_json(report);
    std::cout << aggregate << "\n";
    if (!a.out.empty()) {
        std::vector<std::string> outputs;
        {
            std::ostringstream csv;
            cavres::write_census_csv(csv, report);
            write_file(a.out + ".csv", csv.str());
            outputs.push_back(a.out + ".csv");
        }
        write_file(a.out + ".json", aggregate + "\n");
        outputs.push_back(a.out + ".json");
        if (a.scatter) {
            const std::pair<cavres::ScatterKind, std::string> kinds[] = {
                {cavres::ScatterKind::PhiPhiPlus, "_phi_phiplus.csv"},
                {cavres::ScatterKind::PhiYMax, "_phi_ymax.csv"},
                {cavres::ScatterKind::PhiNc, "_phi_nc.csv"},
            };
            for (const auto& [kind, suffix] : kinds) {
                std::ostringstream csv;
                cavres::write_scatter_csv(csv, report, kind);
                write_file(a.out + suffix, csv.str());
                outputs.push_back(a.out + suffix);
            }
        }
        nlohmann::json params;
        params["shape"] = cavres::emit_shape_spec(spec);
        params["n"] = a.n;
        params["seed"] = a.seed;
        params["scatter"] = a.scatter;
        write_manifest(a.out, "census", params, outputs);
    }
    return 0;
}

struct GridArgs {
    std::string shape;
    int nx = 100;
    int nphi = 100;
    std::string what = "integrand";
    int threads = 0;
    std::string out;
};

int run_grid(const GridArgs& a) {
    const cavres::ShapeSpec spec = load_shape_spec(a.shape);
    const cavres::Cavity cavity = cavres::build_cavity(spec);
    cavres::QuadratureConfig cfg;
    cfg.n_x = a.nx;
    cfg.n_phi = a.nphi;
    cfg.threads = a.threads;
    cavres::Grid2D grid;
    if (a.what == "integrand") {
        grid = cavres::integrand_grid(cavity, cfg);
    } else if (a.what == "deviation") {
        grid = cavres::deviation_grid(cavity, cfg);
        // Export angle differences in degrees like every other CLI angle.
        for (double& v : grid.values) v *= kDeg;
    } else {
        throw cavres::ParseError("unknown grid kind: " + a.what);
    }
    std::ostringstream csv;
    cavres::write_grid_csv(csv, grid);
    if (a.out.empty()) {
        std::cout << csv.str();
    } else {
        write_file(a.out, csv.str());
        nlohmann::json params;
        params["shape"] = cavres::emit_shape_spec(spec);
        params["n_x"] = a.nx;
        params["n_phi"] = a.nphi;
        params["what"] = a.what;
        write_manifest(a.out, "grid", params, {a.out});
    }
    return 0;
}

struct TraceArgs {
    std::string shape;
    double x = 0.0;
    double phi_deg = 0.0;
    std::string out;
};

int run_trace(const TraceArgs& a) {
    const cavres::ShapeSpec spec = load_shape_spec(a.shape);
    const cavres::Cavity cavity = cavres::build_cavity(spec);
    const cavres::EntryState entry{a.x, a.phi_deg / kDeg};
    const cavres::TrajectoryResult result = cavres::trace(cavity, entry);
    nlohmann::json j;
    j["nc"] = result.nc;
    j["exit_x"] = result.exit_x;
    j["exit_phi_deg"] = result.exit_phi * kDeg;
    j["y_max"] = result.y_max;
    j["corner_hit"] = result.corner_hit;
    std::cout << j.dump() << "\n";
    if (!a.out.empty()) {
        std::ostringstream csv;
        cavres::write_trajectory_csv(csv, entry, result);
        write_file(a.out, csv.str());
        nlohmann::json params;
        params["shape"] = cavres::emit_shape_spec(spec);
        params["x"] = a.x;
        params["phi_deg"] = a.phi_deg;
        write_manifest(a.out, "trace", params, {a.out});
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Billiard cavity resistance toolkit"};
    app.set_version_flag("--version", std::string("cavres ") + cavres::kVersion);
    app.require_subcommand(1);

    ResistArgs resist;
    CLI::App* resist_cmd = app.add_subcommand(
        "resist", "Estimate normalized resistance of a cavity");
    resist_cmd->add_option("shape", resist.shape,
                           "Shape alias, inline JSON, or spec file")
        ->required();
    resist_cmd->add_option("--nx", resist.nx, "x nodes");
    resist_cmd->add_option("--nphi", resist.nphi, "phi nodes");
    resist_cmd->add_option("--rule", resist.rule, "midpoint or simpson");
    resist_cmd->add_option("--mc-samples", resist.mc_samples,
                           "Monte-Carlo sample count (overrides quadrature)");
    resist_cmd->add_option("--seed", resist.seed, "Monte-Carlo seed");
    resist_cmd->add_option("--threads", resist.threads,
                           "worker threads (0 = all cores)");
    resist_cmd->add_option("--max-reflections", resist.max_reflections,
                           "per-trace reflection cap");
    resist_cmd->add_option("-o,--out", resist.out, "write the estimate JSON here");

    OptimizeArgs optimize;
    CLI::App* optimize_cmd = app.add_subcommand(
        "optimize", "Maximize resistance over a shape family");
    optimize_cmd->add_option("--family", optimize.family,
                             "quadratic or polyline");
    optimize_cmd->add_option("--k", optimize.k,
                             "polyline parameter count (even)");
    optimize_cmd->add_option("--bounds", optimize.bounds,
                             "per-parameter lo:hi overrides");
    optimize_cmd->add_option("--budget", optimize.budget,
                             "objective evaluations per run");
    optimize_cmd->add_option("--multistart", optimize.multistart,
                             "number of start points");
    optimize_cmd->add_option("--seed", optimize.seed, "start sampling seed");
    optimize_cmd->add_option("--tol", optimize.tol, "stopping tolerance");
    optimize_cmd->add_option("--grid-n", optimize.grid_n,
                             "objective quadrature grid size");
    optimize_cmd->add_option("--rescore-n", optimize.rescore_n,
                             "winner re-scoring grid size");
    optimize_cmd->add_option("--threads", optimize.threads,
                             "worker threads (0 = all cores)");
    optimize_cmd->add_option("-o,--out", optimize.out,
                             "write the result JSON here");

    CensusArgs census_args;
    CLI::App* census_cmd = app.add_subcommand(
        "census", "Seeded trajectory census with violation tallies");
    census_cmd->add_option("shape", census_args.shape,
                           "Shape alias, inline JSON, or spec file")
        ->required();
    census_cmd->add_option("-n,--samples", census_args.n, "sample count");
    census_cmd->add_option("--seed", census_args.seed, "sampling seed");
    census_cmd->add_option("--threads", census_args.threads,
                           "worker threads (0 = all cores)");
    census_cmd->add_flag("--scatter", census_args.scatter,
                         "also write the scatter-pair CSVs");
    census_cmd->add_option("-o,--out", census_args.out,
                           "output basename (writes <out>.csv and <out>.json)");

    GridArgs grid;
    CLI::App* grid_cmd = app.add_subcommand(
        "grid", "Export the integrand or deviation grid as CSV");
    grid_cmd->add_option("shape", grid.shape,
                         "Shape alias, inline JSON, or spec file")
        ->required();
    grid_cmd->add_option("--nx", grid.nx, "x nodes");
    grid_cmd->add_option("--nphi", grid.nphi, "phi nodes");
    grid_cmd->add_option("--what", grid.what, "integrand or deviation");
    grid_cmd->add_option("--threads", grid.threads,
                         "worker threads (0 = all cores)");
    grid_cmd->add_option("-o,--out", grid.out, "output CSV path");

    TraceArgs trace_args;
    CLI::App* trace_cmd = app.add_subcommand(
        "trace", "Trace a single trajectory; optionally dump its events");
    trace_cmd->add_option("shape", trace_args.shape,
                          "Shape alias, inline JSON, or spec file")
        ->required();
    trace_cmd->add_option("--x", trace_args.x, "entry abscissa, |x| < 1/2")
        ->required();
    trace_cmd->add_option("--phi", trace_args.phi_deg,
                          "entry angle in degrees, |phi| < 90")
        ->required();
    trace_cmd->add_option("-o,--out", trace_args.out,
                          "event CSV path (step,x,y,dir_x,dir_y)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help/--version; anything else is arg misuse.
        return code == 0 ? 0 : 2;
    }

    try {
        if (resist_cmd->parsed()) return run_resist(resist);
        if (optimize_cmd->parsed()) return run_optimize(optimize);
        if (census_cmd->parsed()) return run_census(census_args);
        if (grid_cmd->parsed()) return run_grid(grid);
        if (trace_cmd->parsed()) return run_trace(trace_args);
    } catch (const cavres::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cavres::InvalidShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cavres::TraceError& e) {
        std::cerr << "trace failure at (x=" << e.entry.x
                  << ", phi=" << e.entry.phi * kDeg << " deg): " << e.what()
                  << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
