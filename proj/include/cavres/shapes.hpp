#pragma once

// Cavity construction: the parametric shape families, their validation rules,
// and the JSON shape-spec exchange format.
//
// Every cavity spans the unit aperture (-1/2,0)..(1/2,0) and its walls form a
// connected chain between those two points with y >= 0 throughout. Builders
// throw InvalidShapeError when parameters break that contract.

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cavres/geometry.hpp"

namespace cavres {

class InvalidShapeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FlatSpec {
    bool operator==(const FlatSpec&) const = default;
};
struct RectNotchSpec {
    double depth = 1.0;
    bool operator==(const RectNotchSpec&) const = default;
};
struct TriangleNotchSpec {
    bool operator==(const TriangleNotchSpec&) const = default;
};
// Quadratic family: right wall x = g(y) = alpha*y^2 + beta*y + 1/2 with
// alpha = (-beta*h - 1/2)/h^2 so g(h) = 0 exactly; left wall mirrored.
struct QuadraticSpec {
    double h = 1.0;
    double beta = 0.0;
    double alpha() const { return (-beta * h - 0.5) / (h * h); }
    bool operator==(const QuadraticSpec&) const = default;
};
// The quadratic-family optimum: h = sqrt(2), beta = 0. Each parabolic face
// has its focus at the opposite aperture corner.
struct DoubleParabolaSpec {
    bool operator==(const DoubleParabolaSpec&) const = default;
};
struct PolylineSpec {
    std::vector<Vec2> points;  // interior vertices only, in chain order
    bool operator==(const PolylineSpec& o) const;
};

using ShapeSpec = std::variant<FlatSpec, RectNotchSpec, TriangleNotchSpec,
                               QuadraticSpec, DoubleParabolaSpec, PolylineSpec>;

struct Cavity {
    std::vector<BoundaryArc> arcs;
    ShapeSpec descriptor;
};

Cavity flat();
Cavity rect_notch(double depth);
Cavity triangle_notch();
Cavity quadratic_cavity(double h, double beta);
Cavity double_parabola();
// points are the interior vertices; the fixed aperture corners (-1/2,0) and
// (1/2,0) are prepended/appended automatically.
Cavity polyline_cavity(const std::vector<Vec2>& points);

Cavity build_cavity(const ShapeSpec& spec);

// Structural checks shared by all builders: chain connectivity from (-1/2,0)
// to (1/2,0) within 1e-9, all arc points at y >= -1e-9, nonempty arcs.
// Throws InvalidShapeError with a description of the first failure.
void validate_cavity(const Cavity& cavity);

// True when mirroring x -> -x maps the arc set onto itself (within tol).
bool is_left_right_symmetric(const Cavity& cavity, double tol = 1e-9);

// JSON shape-spec format, e.g. {"type":"quadratic","h":1.4142,"beta":0.0}.
// Unknown fields and unknown types are rejected with a diagnostic naming the
// offending field. parse(emit(s)) == s for every valid spec.
ShapeSpec parse_shape_spec(const std::string& text);
std::string emit_shape_spec(const ShapeSpec& spec);

std::string shape_name(const ShapeSpec& spec);

}  // namespace cavres
