#include "cavres/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace cavres {

namespace {

// Roots of A t^2 + B t + C = 0, ascending. Returns the count (0..2).
// Near-tangent discriminants in [-1e-12, 0] are clamped to zero; anything
// more negative is a miss. The stable form avoids cancellation when
// |4AC| << B^2.
int solve_quadratic(double A, double B, double C, double out[2]) {
    if (A == 0.0) {
        if (B == 0.0) return 0;
        out[0] = -C / B;
        return 1;
    }
    double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) {
        if (disc < -1e-12) return 0;
        disc = 0.0;
    }
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + std::copysign(sq, B));
    if (q == 0.0) {
        // B == 0 and disc == 0: double root at t = 0.
        out[0] = 0.0;
        return 1;
    }
    double r0 = q / A;
    double r1 = C / q;
    if (r0 > r1) std::swap(r0, r1);
    out[0] = r0;
    out[1] = r1;
    return r1 > r0 ? 2 : 1;
}

std::optional<Hit> intersect_segment(const Ray& ray, const SegmentArc& s,
                                     double t_min) {
    const Vec2 e = s.p1 - s.p0;
    const double denom = cross(ray.dir, e);
    if (std::abs(denom) < 1e-14) return std::nullopt;  // parallel
    const Vec2 w = s.p0 - ray.origin;
    const double t = cross(w, e) / denom;
    if (!(t > t_min)) return std::nullopt;
    const double u = cross(w, ray.dir) / denom;
    const double len = e.norm();
    const double u_tol = kEndpointTol / len;
    if (u < -u_tol || u > 1.0 + u_tol) return std::nullopt;
    Hit h;
    h.t = t;
    h.point = ray.at(t);
    h.inward_normal = s.inward_normal;
    h.endpoint = (u * len <= kEndpointTol) || ((1.0 - u) * len <= kEndpointTol);
    return h;
}

Vec2 quad_normal(const QuadArc& q, double y) {
    const Vec2 raw{-q.interior_sign, q.interior_sign * q.dxdy(y)};
    return raw.normalized();
}

std::optional<Hit> intersect_quad(const Ray& ray, const QuadArc& qa,
                                  double t_min) {
    // Substitute the ray into x = a y^2 + b y + c.
    const double ox = ray.origin.x, oy = ray.origin.y;
    const double dx = ray.dir.x, dy = ray.dir.y;
    const double A = qa.a * dy * dy;
    const double B = dy * (2.0 * qa.a * oy + qa.b) - dx;
    const double C = (qa.a * oy + qa.b) * oy + qa.c - ox;
    double roots[2];
    const int nr = solve_quadratic(A, B, C, roots);

    const double y_slack = kEndpointTol;
    double best_t = 0.0;
    bool found = false;
    for (int i = 0; i < nr; ++i) {
        const double t = roots[i];
        if (!(t > t_min)) continue;
        const double y = oy + t * dy;
        if (y < qa.y_lo - y_slack || y > qa.y_hi + y_slack) continue;
        best_t = t;
        found = true;
        break;  // roots ascend, first valid is nearest
    }
    if (!found) return std::nullopt;

    Hit h;
    h.t = best_t;
    h.point = ray.at(best_t);
    const double y = std::clamp(h.point.y, qa.y_lo, qa.y_hi);
    h.inward_normal = quad_normal(qa, y);
    const Vec2 end_lo{qa.x_at(qa.y_lo), qa.y_lo};
    const Vec2 end_hi{qa.x_at(qa.y_hi), qa.y_hi};
    h.endpoint = distance(h.point, end_lo) <= kEndpointTol ||
                 distance(h.point, end_hi) <= kEndpointTol;
    return h;
}

double segment_distance(const SegmentArc& s, Vec2 p) {
    const Vec2 e = s.p1 - s.p0;
    const double len2 = e.dot(e);
    const double u = len2 > 0.0 ? std::clamp((p - s.p0).dot(e) / len2, 0.0, 1.0)
                                : 0.0;
    return distance(p, s.p0 + u * e);
}

}  // namespace

std::pair<Vec2, Vec2> BoundaryArc::endpoints() const {
    if (const auto* s = std::get_if<SegmentArc>(&shape)) {
        return {s->p0, s->p1};
    }
    const auto& q = std::get<QuadArc>(shape);
    return {Vec2{q.x_at(q.y_lo), q.y_lo}, Vec2{q.x_at(q.y_hi), q.y_hi}};
}

std::optional<Hit> intersect(const Ray& ray, const BoundaryArc& arc,
                             double t_min) {
    if (const auto* s = std::get_if<SegmentArc>(&arc.shape)) {
        return intersect_segment(ray, *s, t_min);
    }
    return intersect_quad(ray, std::get<QuadArc>(arc.shape), t_min);
}

bool on_arc(const BoundaryArc& arc, Vec2 point, double tol) {
    if (const auto* s = std::get_if<SegmentArc>(&arc.shape)) {
        return segment_distance(*s, point) <= tol;
    }
    const auto& q = std::get<QuadArc>(arc.shape);
    if (point.y < q.y_lo - tol || point.y > q.y_hi + tol) return false;
    const double y = std::clamp(point.y, q.y_lo, q.y_hi);
    // Perpendicular distance estimate from the curve residual.
    const double resid = std::abs(point.x - q.x_at(y));
    const double slope = q.dxdy(y);
    return resid / std::sqrt(1.0 + slope * slope) <= tol;
}

Vec2 normal_at(const BoundaryArc& arc, Vec2 point) {
    if (!on_arc(arc, point)) {
        throw std::invalid_argument("normal_at: point is not on the arc");
    }
    if (const auto* s = std::get_if<SegmentArc>(&arc.shape)) {
        return s->inward_normal;
    }
    const auto& q = std::get<QuadArc>(arc.shape);
    return quad_normal(q, std::clamp(point.y, q.y_lo, q.y_hi));
}

}  // namespace cavres
