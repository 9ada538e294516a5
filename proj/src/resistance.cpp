#include "cavres/resistance.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "cavres/parallel.hpp"
#include "cavres/rng.hpp"
#include "json.hpp"

namespace cavres {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNorm = 3.0 / 8.0;

void check_grid(const QuadratureConfig& cfg, bool require_even) {
    if (cfg.n_x < 2 || cfg.n_phi < 2) {
        throw std::invalid_argument("quadrature grid must be at least 2x2");
    }
    if (require_even && (cfg.n_x % 2 != 0 || cfg.n_phi % 2 != 0)) {
        throw std::invalid_argument(
            "simpson_phi requires even n_x and n_phi");
    }
    if (cfg.threads < 0) {
        throw std::invalid_argument("threads must be >= 0");
    }
}

double x_node(const QuadratureConfig& cfg, int i) {
    // i is 1-based: x_i = -1/2 + (i - 1/2) dx.
    return -0.5 + (i - 0.5) * cfg.dx();
}

}  // namespace

double QuadratureConfig::dphi() const { return kPi / n_phi; }

double integrand(const Cavity& cavity, double x, double phi,
                 int max_reflections, bool* corner) {
    const TrajectoryResult r = trace(cavity, {x, phi}, max_reflections);
    if (corner) *corner = r.corner_hit;
    return (1.0 + std::cos(r.exit_phi - phi)) * std::cos(phi);
}

ResistanceEstimate resistance_quadrature(const Cavity& cavity,
                                         const QuadratureConfig& cfg) {
    check_grid(cfg, false);
    const double dx = cfg.dx();
    const double dphi = cfg.dphi();

    std::vector<double> col(cfg.n_x, 0.0);
    std::vector<long long> col_corners(cfg.n_x, 0);
    parallel_for(static_cast<std::size_t>(cfg.n_x), cfg.threads,
                 [&](std::size_t ix) {
                     const double x = x_node(cfg, static_cast<int>(ix) + 1);
                     double s = 0.0;
                     long long corners = 0;
                     for (int k = 1; k <= cfg.n_phi; ++k) {
                         const double phi = -kPi / 2.0 + (k - 0.5) * dphi;
                         bool corner = false;
                         s += integrand(cavity, x, phi, cfg.max_reflections,
                                        &corner);
                         corners += corner ? 1 : 0;
                     }
                     col[ix] = s;
                     col_corners[ix] = corners;
                 });

    ResistanceEstimate est;
    est.value = kNorm * dx * dphi * pairwise_sum(col);
    est.rule = "midpoint";
    est.n_x = cfg.n_x;
    est.n_phi = cfg.n_phi;
    for (long long c : col_corners) est.corner_hits += c;
    return est;
}

ResistanceEstimate resistance_simpson(const Cavity& cavity,
                                      const QuadratureConfig& cfg) {
    check_grid(cfg, true);
    if (!is_left_right_symmetric(cavity)) {
        throw std::invalid_argument(
            "simpson_phi requires a left-right symmetric cavity");
    }
    const double dx = cfg.dx();
    const double dphi = cfg.dphi();
    const int half = cfg.n_x / 2;

    std::vector<double> col(half, 0.0);
    std::vector<long long> col_corners(half, 0);
    parallel_for(static_cast<std::size_t>(half), cfg.threads,
                 [&](std::size_t j) {
                     // Right half-domain: i = n_x/2 + 1 .. n_x.
                     const int i = half + static_cast<int>(j) + 1;
                     const double x = x_node(cfg, i);
                     double s = 0.0;
                     long long corners = 0;
                     for (int k = 1; k <= cfg.n_phi - 1; ++k) {
                         const double phi = -kPi / 2.0 + k * dphi;
                         const double w = (k % 2 == 1) ? 2.0 : 1.0;
                         bool corner = false;
                         s += w * integrand(cavity, x, phi,
                                            cfg.max_reflections, &corner);
                         corners += corner ? 1 : 0;
                     }
                     col[j] = s;
                     col_corners[j] = corners;
                 });

    ResistanceEstimate est;
    est.value = 0.5 * dx * dphi * pairwise_sum(col);
    est.rule = "simpson_phi";
    est.n_x = cfg.n_x;
    est.n_phi = cfg.n_phi;
    for (long long c : col_corners) est.corner_hits += c;
    return est;
}

ResistanceEstimate resistance_monte_carlo(const Cavity& cavity, long long n,
                                          std::uint64_t seed, int threads,
                                          int max_reflections) {
    if (n < 1000) {
        throw std::invalid_argument("monte carlo needs at least 1000 samples");
    }
    // Pre-generate every sample from one sequential stream so the estimate
    // depends only on the seed, never on the worker count.
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

    std::vector<double> g(n);
    std::vector<unsigned char> corner(n, 0);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        bool c = false;
        g[i] = integrand(cavity, xs[i], phis[i], max_reflections, &c);
        corner[i] = c ? 1 : 0;
    });

    const double mean = pairwise_sum(g) / static_cast<double>(n);
    for (double& v : g) {
        const double d = v - mean;
        v = d * d;
    }
    const double ssd = pairwise_sum(g);
    const double var = n > 1 ? ssd / static_cast<double>(n - 1) : 0.0;

    ResistanceEstimate est;
    est.value = kNorm * kPi * mean;
    est.rule = "monte_carlo";
    est.n_samples = n;
    est.seed = seed;
    est.std_error = kNorm * kPi * std::sqrt(var / static_cast<double>(n));
    for (unsigned char c : corner) est.corner_hits += c;
    return est;
}

double perimeter_ratio(int n_cavities) {
    if (n_cavities < 3) {
        throw std::invalid_argument("perimeter_ratio needs n >= 3");
    }
    const double x = kPi / n_cavities;
    return std::sin(x) / x;
}

double body_resistance(const BodySpec& spec) {
    if (!(spec.eps_over_r >= 0.0) || spec.eps_over_r >= 2.0 * kPi) {
        throw std::invalid_argument("eps_over_r must be in [0, 2*pi)");
    }
    double total = spec.smooth_fraction;
    double weighted = spec.smooth_fraction;  // flat pieces have resistance 1
    for (const BodyPiece& p : spec.pieces) {
        if (p.aperture_fraction < -1e-12) {
            throw std::invalid_argument("piece fractions must be nonnegative");
        }
        total += p.aperture_fraction;
        weighted += p.aperture_fraction * p.resistance;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument(
            "piece fractions plus smooth_fraction must sum to 1");
    }
    const double x = spec.eps_over_r / 2.0;
    const double factor = x > 0.0 ? std::sin(x) / x : 1.0;
    return factor * weighted;
}

Grid2D integrand_grid(const Cavity& cavity, const QuadratureConfig& cfg) {
    check_grid(cfg, false);
    Grid2D grid;
    grid.xs.resize(cfg.n_x);
    grid.phis.resize(cfg.n_phi);
    for (int i = 0; i < cfg.n_x; ++i) grid.xs[i] = x_node(cfg, i + 1);
    for (int k = 0; k < cfg.n_phi; ++k) {
        grid.phis[k] = -kPi / 2.0 + (k + 0.5) * cfg.dphi();
    }
    grid.values.resize(static_cast<std::size_t>(cfg.n_x) * cfg.n_phi);
    parallel_for(static_cast<std::size_t>(cfg.n_phi), cfg.threads,
                 [&](std::size_t k) {
                     for (int i = 0; i < cfg.n_x; ++i) {
                         grid.values[k * cfg.n_x + i] =
                             integrand(cavity, grid.xs[i], grid.phis[k],
                                       cfg.max_reflections);
                     }
                 });
    return grid;
}

std::string estimate_to_json(const ResistanceEstimate& est) {
    nlohmann::json j;
    j["value"] = est.value;
    j["rule"] = est.rule;
    if (est.rule == "monte_carlo") {
        j["n_samples"] = est.n_samples;
        j["seed"] = est.seed;
        j["std_error"] = est.std_error.value_or(0.0);
    } else {
        j["n_x"] = est.n_x;
        j["n_phi"] = est.n_phi;
    }
    j["corner_hits"] = est.corner_hits;
    return j.dump();
}

void write_grid_csv(std::ostream& os, const Grid2D& grid) {
    char buf[64];
    os << "phi\\x";
    for (double x : grid.xs) {
        std::snprintf(buf, sizeof(buf), ",%.17g", x);
        os << buf;
    }
    os << "\n";
    const double deg = 180.0 / kPi;
    for (std::size_t k = 0; k < grid.phis.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", grid.phis[k] * deg);
        os << buf;
        for (std::size_t i = 0; i < grid.xs.size(); ++i) {
            std::snprintf(buf, sizeof(buf), ",%.17g", grid.at(k, i));
            os << buf;
        }
        os << "\n";
    }
}

}  // namespace cavres
