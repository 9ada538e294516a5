#include "cavres/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "cavres/parallel.hpp"
#include "cavres/rng.hpp"
#include "json.hpp"

namespace cavres {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / kPi;

bool alternating_sides(const Cavity& cavity,
                       const std::vector<Reflection>& refl) {
    if (refl.empty()) return false;
    WallSide prev = WallSide::Other;
    for (std::size_t i = 0; i < refl.size(); ++i) {
        const WallSide s = cavity.arcs[refl[i].arc_index].side;
        if (s == WallSide::Other) return false;
        if (i > 0 && s == prev) return false;
        prev = s;
    }
    return true;
}

}  // namespace

TheoremConstants constants() {
    TheoremConstants c{};
    c.phi0 = std::atan(std::sqrt(2.0) / 4.0);
    c.two_phi0 = 2.0 * c.phi0;

    const double r79 = std::sqrt(79.0);
    const double r2 = std::sqrt(2.0);
    const double inner = std::sqrt(-51.0 + 6.0 * r79);

    c.y2_star = (8.0 / 9.0) * inner;
    c.y1_star = (23.0 / 10.0) * r2 -
                std::sqrt(444498.0 - 33120.0 * r2 * inner - 38400.0 * r79) /
                    90.0;
    // Positive root of y^3 + 8y - 4 sqrt(2) = 0 (Cardano).
    const double cbr = std::cbrt(54.0 * r2 + 6.0 * std::sqrt(546.0));
    c.y3_star = cbr / 3.0 - 8.0 / cbr;
    c.y4_star = 0.0;
    return c;
}

CensusReport census(const Cavity& cavity, long long n, std::uint64_t seed,
                    int threads, int max_reflections) {
    if (n < 1) {
        throw std::invalid_argument("census needs at least one sample");
    }
    CensusReport rep;
    rep.n_samples = n;
    rep.seed = seed;
    rep.records.resize(n);

    std::vector<double> xs(n), phis(n);
    SplitMix64 rng(seed);
    for (long long i = 0; i < n; ++i) {
        double x, phi;
        do {
            x = rng.uniform(-0.5, 0.5);
        } while (!(std::abs(x) < 0.5));
        do {
            phi = rng.uniform(-kPi / 2.0, kPi / 2.0);
        } while (!(std::abs(phi) < kPi / 2.0));
        xs[i] = x;
        phis[i] = phi;
    }

    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        CensusRecord& r = rep.records[i];
        r.x = xs[i];
        r.phi = phis[i];
        try {
            const TrajectoryResult t =
                trace(cavity, {r.x, r.phi}, max_reflections);
            r.phi_plus = t.exit_phi;
            r.nc = t.nc;
            r.y_max = t.y_max;
            r.corner = t.corner_hit;
            r.alternating = alternating_sides(cavity, t.reflections);
        } catch (const TraceError&) {
            r.error = true;
            r.nc = -1;
            r.phi_plus = std::numeric_limits<double>::quiet_NaN();
        }
    });

    const TheoremConstants tc = constants();
    for (const CensusRecord& r : rep.records) {
        if (r.error) {
            ++rep.errors;
            continue;
        }
        ++rep.nc_histogram[r.nc];
        const double dev = std::abs(r.phi - r.phi_plus);
        auto [it, inserted] = rep.max_abs_dev_by_nc.try_emplace(r.nc, dev);
        if (!inserted && dev > it->second) it->second = dev;
        if (r.corner) ++rep.corner_hits;

        if (std::abs(r.phi) > tc.phi0 + 1e-6 && !(r.nc == 3 && r.alternating)) {
            ++rep.violations.thm1;
        }
        if (r.nc < 3) ++rep.violations.thm2;
        if (r.nc >= 4 && !(std::abs(r.phi) < tc.phi0 &&
                           std::abs(r.phi_plus) < tc.phi0 &&
                           dev < tc.two_phi0)) {
            ++rep.violations.corollary;
        }
    }
    return rep;
}

Grid2D deviation_grid(const Cavity& cavity, const QuadratureConfig& cfg) {
    Grid2D grid;
    grid.xs.resize(cfg.n_x);
    grid.phis.resize(cfg.n_phi);
    for (int i = 0; i < cfg.n_x; ++i) {
        grid.xs[i] = -0.5 + (i + 0.5) * cfg.dx();
    }
    for (int k = 0; k < cfg.n_phi; ++k) {
        grid.phis[k] = -kPi / 2.0 + (k + 0.5) * cfg.dphi();
    }
    grid.values.resize(static_cast<std::size_t>(cfg.n_x) * cfg.n_phi);
    parallel_for(static_cast<std::size_t>(cfg.n_phi), cfg.threads,
                 [&](std::size_t k) {
                     for (int i = 0; i < cfg.n_x; ++i) {
                         const TrajectoryResult t =
                             trace(cavity, {grid.xs[i], grid.phis[k]},
                                   cfg.max_reflections);
                         grid.values[k * cfg.n_x + i] =
                             grid.phis[k] - t.exit_phi;
                     }
                 });
    return grid;
}

void write_census_csv(std::ostream& os, const CensusReport& report) {
    os << "x,phi_deg,phiplus_deg,nc,y_max,corner\n";
    char buf[200];
    for (const CensusRecord& r : report.records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d,%.17g,%d\n", r.x,
                      r.phi * kDeg, r.phi_plus * kDeg, r.nc, r.y_max,
                      r.corner ? 1 : 0);
        os << buf;
    }
}

void write_scatter_csv(std::ostream& os, const CensusReport& report,
                       ScatterKind kind) {
    char buf[160];
    switch (kind) {
        case ScatterKind::PhiPhiPlus:
            os << "phi_deg,phiplus_deg,nc4plus\n";
            for (const CensusRecord& r : report.records) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", r.phi * kDeg,
                              r.phi_plus * kDeg, r.nc >= 4 ? 1 : 0);
                os << buf;
            }
            break;
        case ScatterKind::PhiYMax:
            os << "phi_deg,y_max,nc4plus\n";
            for (const CensusRecord& r : report.records) {
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", r.phi * kDeg,
                              r.y_max, r.nc >= 4 ? 1 : 0);
                os << buf;
            }
            break;
        case ScatterKind::PhiNc:
            os << "phi_deg,nc\n";
            for (const CensusRecord& r : report.records) {
                std::snprintf(buf, sizeof(buf), "%.17g,%d\n", r.phi * kDeg,
                              r.nc);
                os << buf;
            }
            break;
    }
}

std::string census_aggregate_json(const CensusReport& report) {
    nlohmann::json j;
    j["n_samples"] = report.n_samples;
    j["seed"] = report.seed;
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [nc, count] : report.nc_histogram) {
        hist[std::to_string(nc)] = count;
    }
    j["nc_histogram"] = hist;
    j["violations"] = {{"thm1", report.violations.thm1},
                       {"thm2", report.violations.thm2},
                       {"corollary", report.violations.corollary}};
    nlohmann::json dev = nlohmann::json::object();
    for (const auto& [nc, rad] : report.max_abs_dev_by_nc) {
        dev[std::to_string(nc)] = rad * kDeg;
    }
    j["max_abs_dev_deg_by_nc"] = dev;
    j["corner_hits"] = report.corner_hits;
    j["errors"] = report.errors;
    return j.dump();
}

}  // namespace cavres
