#pragma once

// Specular billiard dynamics inside a cavity: entry/exit angle conventions,
// the trace loop, time-reversal checking, and trajectory dumps.
//
// Angle convention: a particle entering the aperture with entry angle phi
// (measured from the outward aperture normal, positive counterclockwise)
// moves along entry_direction(phi) = (-sin phi, cos phi). On exit with
// direction d (d.y < 0) the exit angle is exit_angle_of(d) = atan2(d.x, -d.y),
// so a flat wall gives phi+ = -phi and a perfect retroreflection gives
// phi+ = phi.

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "cavres/shapes.hpp"

namespace cavres {

struct EntryState {
    double x = 0.0;    // entry abscissa, |x| < 1/2 strictly
    double phi = 0.0;  // entry angle in radians, |phi| < pi/2 strictly
};

Vec2 entry_direction(double phi);

// Exit angle of a downward direction (d.y < 0). Throws std::invalid_argument
// for non-exiting directions.
double exit_angle_of(Vec2 d);

struct Reflection {
    Vec2 point;
    int arc_index = -1;
    Vec2 normal;             // unit normal actually used for the bounce
    bool at_endpoint = false;
};

struct TrajectoryResult {
    std::vector<Reflection> reflections;
    int nc = 0;              // reflection count, == reflections.size()
    double exit_x = 0.0;     // within [-1/2 - 1e-9, 1/2 + 1e-9]
    double exit_phi = 0.0;   // radians
    double y_max = 0.0;      // max reflection height (0 when all bounces at y=0)
    bool corner_hit = false; // any bounce within 1e-9 of an arc endpoint
};

// Trace failures carry the entry and the partial trajectory so integral
// drivers can report the offending sample.
class TraceError : public std::runtime_error {
  public:
    TraceError(const std::string& msg, EntryState entry,
               std::vector<Reflection> partial)
        : std::runtime_error(msg), entry(entry), partial(std::move(partial)) {}
    EntryState entry;
    std::vector<Reflection> partial;
};

class NonTerminationError : public TraceError {
  public:
    using TraceError::TraceError;
};

// A ray found neither a wall nor a valid aperture crossing; means the
// boundary chain has a gap (broken cavity), not a physical event.
class EscapeAnomalyError : public TraceError {
  public:
    using TraceError::TraceError;
};

// Follow a trajectory until it leaves through the aperture. Each step first
// tests the y=0 crossing (accepted when the crossing x lies in the aperture
// and no wall hit comes earlier), then the nearest wall intersection with
// t > kTMin (first step: t >= 0, so cavities whose wall coincides with the
// aperture reflect at entry). Endpoint hits shared by two arcs reflect across
// the bisector of the two inward normals; unshared endpoints use the arc's
// one-sided normal. Throws NonTerminationError after max_reflections bounces
// and EscapeAnomalyError on a boundary gap.
TrajectoryResult trace(const Cavity& cavity, const EntryState& entry,
                       int max_reflections = 1000);

// Re-traces from (exit_x, exit_phi) as a fresh entry and returns
// |phi_back - phi|, which is 0 for exact time reversal. Propagates trace
// errors; also throws std::invalid_argument when the exit lands outside the
// open aperture (corner-grade exit, reversal undefined).
double reverse_check(const Cavity& cavity, const EntryState& entry,
                     int max_reflections = 1000);

// Event dump: one row per event (entry, each reflection, exit) with the
// outgoing direction at that event. Columns: step,x,y,dir_x,dir_y.
void write_trajectory_csv(std::ostream& os, const EntryState& entry,
                          const TrajectoryResult& result);

}  // namespace cavres
