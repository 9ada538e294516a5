#pragma once

// Planar primitives for specular billiard tracing: vectors, rays, boundary
// arcs (line segments and y-parameterized quadratic arcs), ray/arc
// intersection and inward normals.
//
// Conventions used throughout:
//  - the cavity aperture is the segment (-1/2,0)..(1/2,0) on the x-axis and
//    the cavity interior lies in y >= 0;
//  - quadratic arcs are graphs x = a*y^2 + b*y + c over y in [y_lo, y_hi],
//    which keeps vertical walls and parabolic cavity faces in one family;
//  - normals returned by intersection are unit vectors pointing into the
//    cavity interior (one-sided at arc endpoints).

#include <cmath>
#include <optional>
#include <utility>
#include <variant>

namespace cavres {

// Minimum ray parameter accepted after a reflection. Guards against
// re-intersecting the arc we just bounced off.
inline constexpr double kTMin = 1e-9;

// A hit closer than this to an arc endpoint is classified as an endpoint
// (corner) event.
inline constexpr double kEndpointTol = 1e-9;

// Maximum distance from an arc at which a point still counts as "on" it.
inline constexpr double kOnArcTol = 1e-9;

inline constexpr double kApertureHalf = 0.5;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double xx, double yy) : x(xx), y(yy) {}

    constexpr Vec2 operator+(Vec2 r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(Vec2 r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }

    constexpr double dot(Vec2 r) const { return x * r.x + y * r.y; }
    double norm() const { return std::hypot(x, y); }
    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Specular reflection of direction d across unit normal n. Insensitive to the
// sign of n; preserves |d|.
inline constexpr Vec2 reflect(Vec2 d, Vec2 n) {
    return d - 2.0 * d.dot(n) * n;
}

struct Ray {
    Vec2 origin;
    Vec2 dir;  // unit length by convention

    Vec2 at(double t) const { return origin + t * dir; }
};

// Which cavity face an arc belongs to. Used by trajectory censuses to check
// left/right alternation; faces that are neither (floors, ceilings, generic
// polyline edges) are Other.
enum class WallSide { Left, Right, Other };

struct SegmentArc {
    Vec2 p0;
    Vec2 p1;
    Vec2 inward_normal;  // unit, constant along the segment
};

// Graph arc x = a*y^2 + b*y + c, y in [y_lo, y_hi]. interior_sign is +1 when
// the cavity interior lies on the -x side of the curve (a right wall) and -1
// for the +x side (a left wall); the inward normal at height y is
// normalize(interior_sign * (-1, 2a*y + b)).
struct QuadArc {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    double interior_sign = 1.0;

    double x_at(double y) const { return (a * y + b) * y + c; }
    double dxdy(double y) const { return 2.0 * a * y + b; }
};

struct BoundaryArc {
    std::variant<SegmentArc, QuadArc> shape;
    WallSide side = WallSide::Other;

    static BoundaryArc segment(Vec2 p0, Vec2 p1, Vec2 inward_normal,
                               WallSide side = WallSide::Other) {
        return {SegmentArc{p0, p1, inward_normal}, side};
    }
    static BoundaryArc quad(double a, double b, double c, double y_lo,
                            double y_hi, double interior_sign,
                            WallSide side = WallSide::Other) {
        return {QuadArc{a, b, c, y_lo, y_hi, interior_sign}, side};
    }

    // Geometric endpoints in arc-local order (segment p0..p1, quad arc
    // y_lo..y_hi). Chain orientation is not implied.
    std::pair<Vec2, Vec2> endpoints() const;
};

struct Hit {
    double t = 0.0;          // ray parameter, > t_min
    Vec2 point;              // ray.at(t)
    Vec2 inward_normal;      // unit, one-sided at endpoints
    int arc_index = -1;      // filled by callers that own the arc list
    bool endpoint = false;   // within kEndpointTol of an arc endpoint
};

// First intersection of ray with arc at parameter t > t_min, if any.
// Quadratic arcs use the numerically stable root form q = -(b + sign(b)
// sqrt(disc))/2; a discriminant in [-1e-12, 0] is clamped to zero so
// near-tangent hits resolve deterministically.
std::optional<Hit> intersect(const Ray& ray, const BoundaryArc& arc,
                             double t_min);

// True when point lies within tol of the arc (perpendicular distance for
// segments, curve residual for quad arcs including the y-range).
bool on_arc(const BoundaryArc& arc, Vec2 point, double tol = kOnArcTol);

// Inward unit normal at a point on the arc. Throws std::invalid_argument if
// the point is farther than kOnArcTol from the arc.
Vec2 normal_at(const BoundaryArc& arc, Vec2 point);

}  // namespace cavres
