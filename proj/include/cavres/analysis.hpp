#pragma once

// Empirical certification tooling for the reflection structure of cavity
// trajectories: the closed-form critical constants, seeded trajectory
// censuses with violation tallies, deviation grids, and scatter exports.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cavres/resistance.hpp"

namespace cavres {

// Critical constants of the double-parabola reflection theorems.
//  - phi0 = arctan(sqrt(2)/4): entry angles with |phi| > phi0 give exactly
//    three reflections alternating between the two faces; every trajectory
//    has at least three;
//  - two_phi0 bounds |phi - phi+| for trajectories with nc >= 4;
//  - yk_star bounds the k-th bounce height from below in the alternating
//    four-bounce configuration whose impossibility forces nc == 3 at steep
//    entry (closed forms; y4_star = 0).
struct TheoremConstants {
    double phi0;
    double two_phi0;
    double y1_star;
    double y2_star;
    double y3_star;
    double y4_star;
};

TheoremConstants constants();

struct CensusRecord {
    double x = 0.0;
    double phi = 0.0;       // radians
    double phi_plus = 0.0;  // radians; NaN when the trace failed
    int nc = 0;             // -1 when the trace failed
    double y_max = 0.0;
    bool corner = false;
    bool alternating = false;  // bounces strictly alternate Left/Right faces
    bool error = false;
};

struct CensusViolations {
    long long thm1 = 0;       // |phi| > phi0 + 1e-6 without (nc == 3, alternating)
    long long thm2 = 0;       // nc < 3
    long long corollary = 0;  // nc >= 4 without the small-angle bounds
};

struct CensusReport {
    long long n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<CensusRecord> records;
    std::map<int, long long> nc_histogram;
    std::map<int, double> max_abs_dev_by_nc;  // max |phi - phi+| (radians)
    CensusViolations violations;
    long long corner_hits = 0;
    long long errors = 0;
};

// Seeded uniform census over the entry domain. The violation tallies are
// generic counts; they are theorem checks only where the theorems apply
// (the double parabola). Trace failures are recorded per-sample, not fatal.
CensusReport census(const Cavity& cavity, long long n, std::uint64_t seed,
                    int threads = 0, int max_reflections = 1000);

// (phi - phi+) sampled on the midpoint grid of cfg (radians).
Grid2D deviation_grid(const Cavity& cavity, const QuadratureConfig& cfg);

enum class ScatterKind { PhiPhiPlus, PhiYMax, PhiNc };

// census.csv schema: x,phi_deg,phiplus_deg,nc,y_max,corner.
void write_census_csv(std::ostream& os, const CensusReport& report);

// Scatter pair exports; rows with nc >= 4 carry a flag column.
void write_scatter_csv(std::ostream& os, const CensusReport& report,
                       ScatterKind kind);

std::string census_aggregate_json(const CensusReport& report);

}  // namespace cavres
