#pragma once

// Normalized resistance of a cavity and of bodies assembled from cavities.
//
// R = (3/8) * Int_{-1/2}^{1/2} Int_{-pi/2}^{pi/2} (1 + cos(phi+ - phi)) cos(phi)
//     dphi dx
//
// where phi+(x, phi) is the exit angle of the trajectory entering at (x, phi).
// A flat wall gives R = 1; a perfect retroreflector (phi+ = phi everywhere)
// gives the upper bound R = 1.5. Estimators: tensor midpoint quadrature, a
// Simpson-in-phi variant on the half-domain of symmetric cavities, and seeded
// Monte-Carlo.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cavres/billiard.hpp"

namespace cavres {

enum class QuadRule { Midpoint, SimpsonPhi };

// Integral drivers default to a much higher reflection cap than a single
// trace: near-grazing nodes in deep cavities legitimately bounce O(depth/dphi)
// times (rect_notch(10) at a 1000^2 grid needs ~1.3e4), and the cap only
// exists to turn genuinely trapped rays into errors instead of hangs.
inline constexpr int kIntegralMaxReflections = 10'000'000;

struct QuadratureConfig {
    int n_x = 1000;
    int n_phi = 1000;
    QuadRule rule = QuadRule::Midpoint;
    int threads = 0;  // 0 = hardware concurrency
    int max_reflections = kIntegralMaxReflections;

    double dx() const { return 1.0 / n_x; }
    double dphi() const;
};

struct ResistanceEstimate {
    double value = 0.0;
    std::string rule;  // "midpoint" | "simpson_phi" | "monte_carlo"
    int n_x = 0;
    int n_phi = 0;
    long long n_samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> std_error;  // Monte-Carlo only
    long long corner_hits = 0;
};

// G(x, phi) = (1 + cos(phi+ - phi)) cos(phi); sets *corner when the
// trajectory bounced within 1e-9 of an arc endpoint. Trace failures propagate
// (they carry the offending (x, phi)).
double integrand(const Cavity& cavity, double x, double phi,
                 int max_reflections = kIntegralMaxReflections,
                 bool* corner = nullptr);

// Tensor midpoint rule on (-1/2,1/2) x (-pi/2,pi/2): nodes
// x_i = -1/2 + (i-1/2)/n_x, phi_k = -pi/2 + (k-1/2)*pi/n_phi. Accepts any
// n_x, n_phi >= 2. Deterministic for every thread count.
ResistanceEstimate resistance_quadrature(const Cavity& cavity,
                                         const QuadratureConfig& cfg);

// Simpson-in-phi on the right half-domain, doubled by symmetry:
//   R = (1/2) dx dphi sum_{i=n_x/2+1}^{n_x} sum_{k=1}^{n_phi-1} w_k G(x_i, phi_k)
// with w_k = 2 for odd k, 1 for even k, phi_k = -pi/2 + k*dphi, and the same
// midpoint x nodes. Requires even n_x and n_phi and a left-right symmetric
// cavity (checked; throws std::invalid_argument otherwise).
ResistanceEstimate resistance_simpson(const Cavity& cavity,
                                      const QuadratureConfig& cfg);

// Uniform Monte-Carlo with R_hat = (3/8) pi mean(G) and
// std_error = (3/8) pi sd(G)/sqrt(n). Sample coordinates are pre-generated
// from splitmix64(seed), evaluation is parallel over fixed slots and the
// reduction is pairwise, so results are bit-identical for every thread count.
ResistanceEstimate resistance_monte_carlo(
    const Cavity& cavity, long long n, std::uint64_t seed, int threads = 0,
    int max_reflections = kIntegralMaxReflections);

// Perimeter shortening factor of a convex body whose boundary is tiled by n
// equal cavity-carrying chords: sin(pi/n) / (pi/n).
double perimeter_ratio(int n_cavities);

// A body piece: a cavity family occupying a fraction of the hull perimeter
// with a known (already estimated) resistance.
struct BodyPiece {
    std::string descriptor;
    double aperture_fraction = 0.0;  // of the non-smooth perimeter budget
    double resistance = 1.0;
};

// eps/r is the cavity chord-to-radius ratio; smooth_fraction is the part of
// the perimeter left flat (resistance 1).
struct BodySpec {
    double eps_over_r = 0.0;
    double smooth_fraction = 0.0;
    std::vector<BodyPiece> pieces;
};

// R(B) = sinc(eps/2r) * (smooth_fraction + sum_i fraction_i * R_i); piece
// fractions plus smooth_fraction must total 1 within 1e-9.
double body_resistance(const BodySpec& spec);

// Row-major grid, values[k*nx + i] at (x_i, phi_k).
struct Grid2D {
    std::vector<double> xs;
    std::vector<double> phis;  // radians
    std::vector<double> values;

    double at(std::size_t k, std::size_t i) const {
        return values[k * xs.size() + i];
    }
};

// G sampled on the midpoint grid of cfg.
Grid2D integrand_grid(const Cavity& cavity, const QuadratureConfig& cfg);

std::string estimate_to_json(const ResistanceEstimate& est);

// Header row "phi\x" then x nodes; one row per phi node (degrees), %.17g.
void write_grid_csv(std::ostream& os, const Grid2D& grid);

}  // namespace cavres
