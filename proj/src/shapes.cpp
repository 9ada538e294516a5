#include "cavres/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cavres {

namespace {

using nlohmann::json;

constexpr double kChainTol = 1e-9;

Vec2 right_normal_of(Vec2 p0, Vec2 p1) {
    const Vec2 t = (p1 - p0).normalized();
    // Chains run from (-1/2,0) to (1/2,0) with the interior on the right of
    // each directed edge (the closing aperture edge runs right-to-left).
    return {t.y, -t.x};
}

// Proper or improper intersection of two closed segments. Used only for the
// polyline self-intersection check, so a conservative answer is fine.
bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
        const double v = cross(q - p, r - p);
        if (v > 1e-12) return 1;
        if (v < -1e-12) return -1;
        return 0;
    };
    const int o1 = orient(a, b, c);
    const int o2 = orient(a, b, d);
    const int o3 = orient(c, d, a);
    const int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    const auto on = [](Vec2 p, Vec2 q, Vec2 r) {
        return std::min(p.x, q.x) - 1e-12 <= r.x &&
               r.x <= std::max(p.x, q.x) + 1e-12 &&
               std::min(p.y, q.y) - 1e-12 <= r.y &&
               r.y <= std::max(p.y, q.y) + 1e-12;
    };
    if (o1 == 0 && on(a, b, c)) return true;
    if (o2 == 0 && on(a, b, d)) return true;
    if (o3 == 0 && on(c, d, a)) return true;
    if (o4 == 0 && on(c, d, b)) return true;
    return false;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw InvalidShapeError(std::string(what) + " must be finite");
    }
}

}  // namespace

bool PolylineSpec::operator==(const PolylineSpec& o) const {
    if (points.size() != o.points.size()) return false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].x != o.points[i].x || points[i].y != o.points[i].y) {
            return false;
        }
    }
    return true;
}

Cavity flat() {
    Cavity c;
    c.descriptor = FlatSpec{};
    c.arcs.push_back(BoundaryArc::segment({-kApertureHalf, 0.0},
                                          {kApertureHalf, 0.0}, {0.0, -1.0}));
    validate_cavity(c);
    return c;
}

Cavity rect_notch(double depth) {
    require_finite(depth, "rect_notch depth");
    if (depth <= 0.0) {
        throw InvalidShapeError("rect_notch depth must be positive");
    }
    Cavity c;
    c.descriptor = RectNotchSpec{depth};
    const Vec2 bl{-kApertureHalf, 0.0}, tl{-kApertureHalf, depth};
    const Vec2 tr{kApertureHalf, depth}, br{kApertureHalf, 0.0};
    c.arcs.push_back(BoundaryArc::segment(bl, tl, {1.0, 0.0}, WallSide::Left));
    c.arcs.push_back(BoundaryArc::segment(tl, tr, {0.0, -1.0}));
    c.arcs.push_back(BoundaryArc::segment(tr, br, {-1.0, 0.0}, WallSide::Right));
    validate_cavity(c);
    return c;
}

Cavity triangle_notch() {
    Cavity c;
    c.descriptor = TriangleNotchSpec{};
    const Vec2 l{-kApertureHalf, 0.0}, apex{0.0, 0.5}, r{kApertureHalf, 0.0};
    c.arcs.push_back(
        BoundaryArc::segment(l, apex, right_normal_of(l, apex), WallSide::Left));
    c.arcs.push_back(BoundaryArc::segment(apex, r, right_normal_of(apex, r),
                                          WallSide::Right));
    validate_cavity(c);
    return c;
}

Cavity quadratic_cavity(double h, double beta) {
    require_finite(h, "quadratic h");
    require_finite(beta, "quadratic beta");
    if (h <= 0.0) {
        throw InvalidShapeError("quadratic h must be positive");
    }
    const QuadraticSpec spec{h, beta};
    const double alpha = spec.alpha();
    // g(y) = alpha y^2 + beta y + 1/2 must stay nonnegative on [0, h];
    // g(0) = 1/2 and g(h) = 0 by construction, so only an interior vertex of
    // an upward parabola can dip below zero.
    if (alpha > 0.0) {
        const double yv = -beta / (2.0 * alpha);
        if (yv > 0.0 && yv < h) {
            const double gv = (alpha * yv + beta) * yv + 0.5;
            if (gv < -1e-12) {
                throw InvalidShapeError(
                    "quadratic wall dips below the aperture line (g < 0 "
                    "inside (0,h))");
            }
        }
    }
    Cavity c;
    c.descriptor = spec;
    c.arcs.push_back(
        BoundaryArc::quad(-alpha, -beta, -0.5, 0.0, h, -1.0, WallSide::Left));
    c.arcs.push_back(
        BoundaryArc::quad(alpha, beta, 0.5, 0.0, h, 1.0, WallSide::Right));
    validate_cavity(c);
    return c;
}

Cavity double_parabola() {
    Cavity c = quadratic_cavity(std::sqrt(2.0), 0.0);
    c.descriptor = DoubleParabolaSpec{};
    return c;
}

Cavity polyline_cavity(const std::vector<Vec2>& points) {
    // The list is the whole chain, aperture corners included.
    if (points.size() < 2) {
        throw InvalidShapeError("polyline needs at least two points");
    }
    for (const Vec2& p : points) {
        require_finite(p.x, "polyline vertex x");
        require_finite(p.y, "polyline vertex y");
    }
    const std::vector<Vec2>& chain = points;

    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        if (distance(chain[i], chain[i + 1]) <= 1e-9) {
            throw InvalidShapeError("polyline has a degenerate segment");
        }
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        for (std::size_t j = i + 2; j + 1 < chain.size(); ++j) {
            if (segments_touch(chain[i], chain[i + 1], chain[j], chain[j + 1])) {
                throw InvalidShapeError("polyline chain self-intersects");
            }
        }
    }

    Cavity c;
    c.descriptor = PolylineSpec{points};
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        c.arcs.push_back(BoundaryArc::segment(
            chain[i], chain[i + 1], right_normal_of(chain[i], chain[i + 1])));
    }
    validate_cavity(c);
    return c;
}

Cavity build_cavity(const ShapeSpec& spec) {
    return std::visit(
        [](const auto& s) -> Cavity {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FlatSpec>) {
                return flat();
            } else if constexpr (std::is_same_v<T, RectNotchSpec>) {
                return rect_notch(s.depth);
            } else if constexpr (std::is_same_v<T, TriangleNotchSpec>) {
                return triangle_notch();
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                Cavity c = quadratic_cavity(s.h, s.beta);
                c.descriptor = s;  // keep exact parameters in the descriptor
                return c;
            } else if constexpr (std::is_same_v<T, DoubleParabolaSpec>) {
                return double_parabola();
            } else {
                return polyline_cavity(s.points);
            }
        },
        spec);
}

void validate_cavity(const Cavity& cavity) {
    if (cavity.arcs.empty()) {
        throw InvalidShapeError("cavity has no boundary arcs");
    }
    for (const BoundaryArc& arc : cavity.arcs) {
        const auto [a, b] = arc.endpoints();
        if (std::min(a.y, b.y) < -kChainTol) {
            throw InvalidShapeError("boundary arc drops below the aperture");
        }
        if (const auto* q = std::get_if<QuadArc>(&arc.shape)) {
            if (!(q->y_hi > q->y_lo)) {
                throw InvalidShapeError("quad arc has empty y-range");
            }
            if (q->y_lo < -kChainTol) {
                throw InvalidShapeError("boundary arc drops below the aperture");
            }
        } else {
            const auto& s = std::get<SegmentArc>(arc.shape);
            if (distance(s.p0, s.p1) <= 1e-12) {
                throw InvalidShapeError("degenerate segment arc");
            }
        }
    }
    // Undirected chain walk from (-1/2,0); every arc must extend the walk and
    // the walk must terminate at (1/2,0).
    Vec2 cur{-kApertureHalf, 0.0};
    for (std::size_t i = 0; i < cavity.arcs.size(); ++i) {
        const auto [a, b] = cavity.arcs[i].endpoints();
        if (distance(a, cur) <= kChainTol) {
            cur = b;
        } else if (distance(b, cur) <= kChainTol) {
            cur = a;
        } else {
            throw InvalidShapeError("boundary chain is disconnected at arc " +
                                    std::to_string(i));
        }
    }
    if (distance(cur, Vec2{kApertureHalf, 0.0}) > kChainTol) {
        throw InvalidShapeError("boundary chain does not end at (1/2, 0)");
    }
}

bool is_left_right_symmetric(const Cavity& cavity, double tol) {
    const auto mirrors = [tol](const BoundaryArc& x, const BoundaryArc& y) {
        if (const auto* sx = std::get_if<SegmentArc>(&x.shape)) {
            const auto* sy = std::get_if<SegmentArc>(&y.shape);
            if (!sy) return false;
            const Vec2 m0{-sx->p0.x, sx->p0.y}, m1{-sx->p1.x, sx->p1.y};
            const Vec2 mn{-sx->inward_normal.x, sx->inward_normal.y};
            const bool ends =
                (distance(m0, sy->p0) <= tol && distance(m1, sy->p1) <= tol) ||
                (distance(m0, sy->p1) <= tol && distance(m1, sy->p0) <= tol);
            return ends && distance(mn, sy->inward_normal) <= tol;
        }
        const auto& qx = std::get<QuadArc>(x.shape);
        const auto* qy = std::get_if<QuadArc>(&y.shape);
        if (!qy) return false;
        return std::abs(qx.a + qy->a) <= tol && std::abs(qx.b + qy->b) <= tol &&
               std::abs(qx.c + qy->c) <= tol &&
               std::abs(qx.y_lo - qy->y_lo) <= tol &&
               std::abs(qx.y_hi - qy->y_hi) <= tol &&
               std::abs(qx.interior_sign + qy->interior_sign) <= tol;
    };
    for (const BoundaryArc& arc : cavity.arcs) {
        bool matched = false;
        for (const BoundaryArc& other : cavity.arcs) {
            if (mirrors(arc, other)) {
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

namespace {

double require_number(const json& j, const std::string& field) {
    if (!j.contains(field)) {
        throw ParseError("shape spec: missing field \"" + field + "\"");
    }
    if (!j.at(field).is_number()) {
        throw ParseError("shape spec: field \"" + field +
                         "\" must be a number");
    }
    return j.at(field).get<double>();
}

void reject_unknown(const json& j, std::set<std::string> allowed) {
    allowed.insert("type");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ParseError("shape spec: unknown field \"" + item.key() +
                             "\"");
        }
    }
}

}  // namespace

ShapeSpec parse_shape_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("shape spec: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("shape spec: top level must be a JSON object");
    }
    if (!j.contains("type") || !j.at("type").is_string()) {
        throw ParseError("shape spec: missing string field \"type\"");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "flat") {
        reject_unknown(j, {});
        return FlatSpec{};
    }
    if (type == "rect_notch") {
        reject_unknown(j, {"depth"});
        return RectNotchSpec{require_number(j, "depth")};
    }
    if (type == "triangle_notch") {
        reject_unknown(j, {});
        return TriangleNotchSpec{};
    }
    if (type == "quadratic") {
        reject_unknown(j, {"h", "beta"});
        return QuadraticSpec{require_number(j, "h"), require_number(j, "beta")};
    }
    if (type == "double_parabola") {
        reject_unknown(j, {});
        return DoubleParabolaSpec{};
    }
    if (type == "polyline") {
        reject_unknown(j, {"points"});
        if (!j.contains("points") || !j.at("points").is_array()) {
            throw ParseError("shape spec: polyline requires an array field "
                             "\"points\"");
        }
        PolylineSpec p;
        for (const auto& pt : j.at("points")) {
            if (!pt.is_array() || pt.size() != 2 || !pt.at(0).is_number() ||
                !pt.at(1).is_number()) {
                throw ParseError(
                    "shape spec: polyline points must be [x, y] number pairs");
            }
            p.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        }
        return p;
    }
    throw ParseError("shape spec: unknown type \"" + type + "\"");
}

std::string emit_shape_spec(const ShapeSpec& spec) {
    json j;
    std::visit(
        [&j](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FlatSpec>) {
                j["type"] = "flat";
            } else if constexpr (std::is_same_v<T, RectNotchSpec>) {
                j["type"] = "rect_notch";
                j["depth"] = s.depth;
            } else if constexpr (std::is_same_v<T, TriangleNotchSpec>) {
                j["type"] = "triangle_notch";
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                j["type"] = "quadratic";
                j["h"] = s.h;
                j["beta"] = s.beta;
            } else if constexpr (std::is_same_v<T, DoubleParabolaSpec>) {
                j["type"] = "double_parabola";
            } else {
                j["type"] = "polyline";
                json pts = json::array();
                for (const Vec2& p : s.points) {
                    pts.push_back(json::array({p.x, p.y}));
                }
                j["points"] = pts;
            }
        },
        spec);
    return j.dump();
}

std::string shape_name(const ShapeSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FlatSpec>) {
                return "flat";
            } else if constexpr (std::is_same_v<T, RectNotchSpec>) {
                return "rect_notch";
            } else if constexpr (std::is_same_v<T, TriangleNotchSpec>) {
                return "triangle_notch";
            } else if constexpr (std::is_same_v<T, QuadraticSpec>) {
                return "quadratic";
            } else if constexpr (std::is_same_v<T, DoubleParabolaSpec>) {
                return "double_parabola";
            } else {
                return "polyline";
            }
        },
        spec);
}

}  // namespace cavres
