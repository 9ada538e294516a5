#include "cavres/billiard.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

namespace cavres {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Aperture crossings are accepted with this much slack beyond +-1/2; exits
// via a corner land exactly on the boundary.
constexpr double kExitSlack = 1e-9;

void check_entry(const EntryState& e) {
    if (!(std::abs(e.x) < kApertureHalf) || !std::isfinite(e.x)) {
        throw std::invalid_argument("entry x must satisfy |x| < 1/2");
    }
    if (!(std::abs(e.phi) < kHalfPi) || !std::isfinite(e.phi)) {
        throw std::invalid_argument("entry phi must satisfy |phi| < pi/2");
    }
}

// Bisector normal at a corner shared by two arcs; falls back to the primary
// one-sided normal when the endpoint belongs to a single arc (chain ends) or
// the two normals cancel (straight join). The one-sided normal alone would
// eject axis-aligned hits at a convex corner (e.g. the shared apex of two
// parabolic faces) out of the cavity.
Vec2 corner_normal(const Cavity& cav, int hit_arc, Vec2 point, Vec2 primary) {
    for (std::size_t i = 0; i < cav.arcs.size(); ++i) {
        if (static_cast<int>(i) == hit_arc) continue;
        const auto [a, b] = cav.arcs[i].endpoints();
        Vec2 shared;
        if (distance(a, point) <= 2.0 * kEndpointTol) {
            shared = a;
        } else if (distance(b, point) <= 2.0 * kEndpointTol) {
            shared = b;
        } else {
            continue;
        }
        const Vec2 other = normal_at(cav.arcs[i], shared);
        const Vec2 sum = primary + other;
        return sum.norm() > 1e-12 ? sum.normalized() : primary;
    }
    return primary;
}

}  // namespace

Vec2 entry_direction(double phi) { return {-std::sin(phi), std::cos(phi)}; }

double exit_angle_of(Vec2 d) {
    if (!(d.y < 0.0)) {
        throw std::invalid_argument("exit_angle_of: direction must point down");
    }
    return std::atan2(d.x, -d.y);
}

TrajectoryResult trace(const Cavity& cavity, const EntryState& entry,
                       int max_reflections) {
    check_entry(entry);

    TrajectoryResult res;
    Vec2 p{entry.x, 0.0};
    Vec2 d = entry_direction(entry.phi);
    // First step may reflect at t = 0 (walls coincident with the aperture);
    // afterwards kTMin guards against re-hitting the last wall.
    double t_min = -1e-12;

    while (true) {
        // Aperture crossing first. Only downward rays can exit; the crossing
        // wins when no wall hit comes strictly earlier.
        double t_exit = -1.0;
        bool has_exit = false;
        if (d.y < 0.0) {
            const double t = -p.y / d.y;  // p.y >= 0, so t >= 0
            if (t >= 0.0) {
                const double xe = p.x + t * d.x;
                if (std::abs(xe) <= kApertureHalf + kExitSlack) {
                    t_exit = t;
                    has_exit = true;
                }
            }
        }

        std::optional<Hit> best;
        const Ray ray{p, d};
        for (std::size_t i = 0; i < cavity.arcs.size(); ++i) {
            auto h = intersect(ray, cavity.arcs[i], t_min);
            if (h && (!best || h->t < best->t)) {
                h->arc_index = static_cast<int>(i);
                best = h;
            }
        }

        if (has_exit && (!best || t_exit < best->t)) {
            res.exit_x = p.x + t_exit * d.x;
            res.exit_phi = exit_angle_of(d);
            return res;
        }
        if (!best) {
            throw EscapeAnomalyError(
                "trace: ray found no wall and no aperture exit (boundary gap)",
                entry, res.reflections);
        }

        if (res.nc == max_reflections) {
            throw NonTerminationError("trace: exceeded max_reflections", entry,
                                      res.reflections);
        }
        Vec2 n = best->inward_normal;
        if (best->endpoint) {
            n = corner_normal(cavity, best->arc_index, best->point, n);
            res.corner_hit = true;
        }
        // Grazing hits (|d.n| < 1e-10) take the same specular law; the
        // direction is left essentially unchanged and kTMin plus wall
        // curvature keep the walk advancing.
        d = reflect(d, n);
        p = best->point;
        res.reflections.push_back(
            {best->point, best->arc_index, n, best->endpoint});
        res.nc = static_cast<int>(res.reflections.size());
        res.y_max = std::max(res.y_max, best->point.y);
        t_min = kTMin;
    }
}

double reverse_check(const Cavity& cavity, const EntryState& entry,
                     int max_reflections) {
    const TrajectoryResult fwd = trace(cavity, entry, max_reflections);
    if (!(std::abs(fwd.exit_x) < kApertureHalf)) {
        throw std::invalid_argument(
            "reverse_check: trajectory exits at the aperture corner");
    }
    const TrajectoryResult back =
        trace(cavity, {fwd.exit_x, fwd.exit_phi}, max_reflections);
    return std::abs(back.exit_phi - entry.phi);
}

void write_trajectory_csv(std::ostream& os, const EntryState& entry,
                          const TrajectoryResult& result) {
    os << "step,x,y,dir_x,dir_y\n";
    char buf[160];
    Vec2 d = entry_direction(entry.phi);
    int step = 0;
    const auto row = [&](Vec2 pt, Vec2 dir) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", step++,
                      pt.x, pt.y, dir.x, dir.y);
        os << buf;
    };
    row({entry.x, 0.0}, d);
    for (const Reflection& r : result.reflections) {
        d = reflect(d, r.normal);
        row(r.point, d);
    }
    row({result.exit_x, 0.0}, d);
}

}  // namespace cavres
