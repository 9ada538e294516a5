#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cavres/billiard.hpp"
#include "cavres/rng.hpp"
#include "cavres/shapes.hpp"

using namespace cavres;

namespace {

const double kSqrt2 = std::sqrt(2.0);

double deg(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

TEST_SUITE_BEGIN("billiard");

TEST_CASE("entry_direction and exit_angle_of conventions") {
    const Vec2 up = entry_direction(0.0);
    CHECK(up.x == 0.0);
    CHECK(up.y == 1.0);

    const Vec2 tilted = entry_direction(deg(45.0));
    CHECK(tilted.x == doctest::Approx(-kSqrt2 / 2.0));
    CHECK(tilted.y == doctest::Approx(kSqrt2 / 2.0));

    CHECK(exit_angle_of({0.0, -1.0}) == 0.0);
    for (double phi : {-1.2, -0.3, 0.0, 0.7, 1.4}) {
        const Vec2 d{std::sin(phi), -std::cos(phi)};
        CHECK(exit_angle_of(d) == doctest::Approx(phi).epsilon(1e-12));
    }
    CHECK_THROWS_AS(exit_angle_of({0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(exit_angle_of({1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("entry validation") {
    const Cavity cav = triangle_notch();
    CHECK_THROWS_AS(trace(cav, {0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(trace(cav, {-0.51, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(trace(cav, {0.0, std::numbers::pi / 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(trace(cav, {0.0, -1.6}), std::invalid_argument);
    CHECK_THROWS_AS(trace(cav, {std::nan(""), 0.0}), std::invalid_argument);
    CHECK_NOTHROW(trace(cav, {0.499, 0.0}));
}

TEST_CASE("flat wall: single bounce, phi+ = -phi") {
    const Cavity cav = flat();
    SplitMix64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const double x = rng.uniform(-0.499, 0.499);
        const double phi = rng.uniform(-1.5, 1.5);
        const TrajectoryResult r = trace(cav, {x, phi});
        CHECK(r.nc == 1);
        CHECK(r.exit_x == doctest::Approx(x).epsilon(1e-12));
        CHECK(r.exit_phi == doctest::Approx(-phi).epsilon(1e-12));
        CHECK(r.y_max == 0.0);
    }
}

TEST_CASE("rect_notch vertical entry: floor bounce and straight return") {
    const Cavity cav = rect_notch(10.0);
    const TrajectoryResult r = trace(cav, {0.0, 0.0});
    CHECK(r.nc == 1);
    CHECK(r.exit_phi == doctest::Approx(0.0));
    CHECK(r.exit_x == doctest::Approx(0.0));
    CHECK(r.y_max == doctest::Approx(10.0));
}

TEST_CASE("rect_notch preserves |phi| (axis-aligned mirrors)") {
    const Cavity cav = rect_notch(10.0);
    const TrajectoryResult r = trace(cav, {0.1, deg(-45.0)});
    CHECK(r.nc > 5);
    CHECK(std::abs(r.exit_phi) == doctest::Approx(deg(45.0)).epsilon(1e-12));
    for (const Reflection& ref : r.reflections) {
        CHECK(std::abs(ref.point.x) <= 0.5 + 1e-9);
        CHECK(ref.point.y >= -1e-9);
        CHECK(ref.point.y <= 10.0 + 1e-9);
    }
}

TEST_CASE("triangle notch: hand-traced two-bounce path") {
    const Cavity cav = triangle_notch();
    const TrajectoryResult r = trace(cav, {-0.2, 0.0});
    REQUIRE(r.nc == 2);
    CHECK(r.reflections[0].point.x == doctest::Approx(-0.2));
    CHECK(r.reflections[0].point.y == doctest::Approx(0.3));
    CHECK(r.reflections[1].point.x == doctest::Approx(0.2));
    CHECK(r.reflections[1].point.y == doctest::Approx(0.3));
    CHECK(r.exit_x == doctest::Approx(0.2));
    CHECK(r.exit_phi == doctest::Approx(0.0));
    CHECK(r.y_max == doctest::Approx(0.3));
    CHECK_FALSE(r.corner_hit);
}

TEST_CASE("triangle notch: two-bounce rays retroreflect (phi+ = phi)") {
    const Cavity cav = triangle_notch();
    SplitMix64 rng(11);
    int two_bounce = 0;
    for (int i = 0; i < 300; ++i) {
        const double x = rng.uniform(-0.45, 0.45);
        const double phi = rng.uniform(deg(-40.0), deg(40.0));
        const TrajectoryResult r = trace(cav, {x, phi});
        if (r.nc != 2) continue;
        ++two_bounce;
        CHECK(r.exit_phi == doctest::Approx(phi).epsilon(1e-9));
    }
    CHECK(two_bounce > 150);
}

TEST_CASE("corner bounce at the triangle apex returns along the axis") {
    const Cavity cav = triangle_notch();
    const TrajectoryResult r = trace(cav, {0.0, 0.0});
    REQUIRE(r.nc == 1);
    CHECK(r.corner_hit);
    CHECK(r.reflections[0].at_endpoint);
    CHECK(r.exit_x == doctest::Approx(0.0));
    CHECK(r.exit_phi == doctest::Approx(0.0));
    CHECK(r.y_max == doctest::Approx(0.5));
}

TEST_CASE("corner bounce at the double parabola apex") {
    const Cavity cav = double_parabola();
    const TrajectoryResult r = trace(cav, {0.0, 0.0});
    REQUIRE(r.nc == 1);
    CHECK(r.corner_hit);
    CHECK(r.y_max == doctest::Approx(kSqrt2));
    CHECK(r.exit_x == doctest::Approx(0.0));
    CHECK(r.exit_phi == doctest::Approx(0.0));
}

TEST_CASE("rect_notch inner corner uses the bisector of both walls") {
    const Cavity cav = rect_notch(10.0);
    // Aim from the aperture center exactly at the inner corner (1/2, 10).
    const TrajectoryResult r = trace(cav, {0.0, -std::atan(0.05)});
    REQUIRE(r.nc >= 1);
    CHECK(r.corner_hit);
    CHECK(r.reflections[0].at_endpoint);
    CHECK(r.reflections[0].point.x == doctest::Approx(0.5));
    CHECK(r.reflections[0].point.y == doctest::Approx(10.0));
    // The 45-degree bisector swaps the direction components, so the ray drops
    // steeply and walks down the shaft: many bounces, then a clean exit.
    CHECK(r.nc > 100);
    CHECK(std::abs(r.exit_x) <= 0.5 + 1e-9);
    CHECK(std::abs(r.exit_phi) ==
          doctest::Approx(std::numbers::pi / 2.0 - std::atan(0.05)).epsilon(1e-9));
}

TEST_CASE("double parabola: steep entries make three alternating bounces") {
    const Cavity cav = double_parabola();
    const double phi0 = std::atan(kSqrt2 / 4.0);
    SplitMix64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform(-0.499, 0.499);
        double phi = rng.uniform(phi0 + 0.01, 1.55);
        if (rng.uniform01() < 0.5) phi = -phi;
        const TrajectoryResult r = trace(cav, {x, phi});
        REQUIRE(r.nc == 3);
        const WallSide s0 = cav.arcs[r.reflections[0].arc_index].side;
        const WallSide s1 = cav.arcs[r.reflections[1].arc_index].side;
        const WallSide s2 = cav.arcs[r.reflections[2].arc_index].side;
        CHECK(s0 != s1);
        CHECK(s1 != s2);
        CHECK(s0 == s2);
    }
}

TEST_CASE("double parabola: specific steep entry") {
    const Cavity cav = double_parabola();
    const TrajectoryResult r = trace(cav, {0.45, deg(75.0)});
    CHECK(r.nc == 3);
    CHECK(std::abs(r.exit_x) < 0.5);
    CHECK(r.y_max > 0.0);
    CHECK(r.y_max < kSqrt2);
}

TEST_CASE("time reversal: retracing the exit returns the entry angle") {
    SplitMix64 rng(23);
    const Cavity cavities[] = {flat(), triangle_notch(), rect_notch(2.0),
                               double_parabola(), quadratic_cavity(1.0, 0.4)};
    for (const Cavity& cav : cavities) {
        int tested = 0;
        for (int i = 0; i < 120; ++i) {
            const double x = rng.uniform(-0.49, 0.49);
            const double phi = rng.uniform(-1.5, 1.5);
            double dev = 0.0;
            try {
                dev = reverse_check(cav, {x, phi});
            } catch (const std::invalid_argument&) {
                continue;  // exit landed on the aperture edge; reversal undefined
            }
            CHECK(dev < 1e-6);
            ++tested;
        }
        CHECK(tested > 100);
    }
}

TEST_CASE("non-termination cap throws with the partial trajectory") {
    const Cavity cav = rect_notch(10.0);
    try {
        trace(cav, {0.0, deg(80.0)}, 5);
        FAIL("expected NonTerminationError");
    } catch (const NonTerminationError& e) {
        CHECK(e.partial.size() == 5);
        CHECK(e.entry.x == 0.0);
        CHECK(e.entry.phi == doctest::Approx(deg(80.0)));
    }
    // The same entry terminates fine with the default cap.
    CHECK_NOTHROW(trace(cav, {0.0, deg(80.0)}));
}

TEST_CASE("escape anomaly on a broken boundary chain") {
    // Hand-built cavity with a gap: only the left triangle wall.
    Cavity broken;
    broken.descriptor = PolylineSpec{{{-0.5, 0.0}, {0.0, 0.5}}};
    const Vec2 n = Vec2{0.5, -0.5}.normalized();
    broken.arcs.push_back(BoundaryArc::segment({-0.5, 0.0}, {0.0, 0.5}, n));
    CHECK_THROWS_AS(trace(broken, {0.3, 0.0}), EscapeAnomalyError);
}

TEST_CASE("trajectory CSV dump has one row per event") {
    const Cavity cav = triangle_notch();
    const EntryState entry{-0.2, 0.0};
    const TrajectoryResult r = trace(cav, entry);
    std::ostringstream os;
    write_trajectory_csv(os, entry, r);

    std::istringstream is(os.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line)) lines.push_back(line);
    REQUIRE(lines.size() == static_cast<std::size_t>(r.nc) + 3);
    CHECK(lines[0] == "step,x,y,dir_x,dir_y");
    CHECK(lines[1].rfind("0,", 0) == 0);
    // Exit row: step nc+1, at y=0, moving downward.
    std::istringstream last(lines.back());
    std::string tok;
    std::getline(last, tok, ',');
    CHECK(tok == std::to_string(r.nc + 1));
    std::getline(last, tok, ',');
    CHECK(std::stod(tok) == doctest::Approx(r.exit_x));
    std::getline(last, tok, ',');
    CHECK(std::stod(tok) == doctest::Approx(0.0));
}

TEST_SUITE_END();
