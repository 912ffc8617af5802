#include <cmath>
#include <random>

#include "doctest.h"
#include "robinband/errors.hpp"
#include "robinband/geometry.hpp"

using namespace robinband;
using namespace robinband::geometry;

TEST_CASE("circle: arc length, curvature, turning number") {
    const auto c = BoundaryCurve::circle(2.0, 512);
    CHECK(c.total_length() == doctest::Approx(4.0 * M_PI).epsilon(1e-8));
    CHECK(c.counterclockwise());
    for (double s : {0.0, 1.7, 5.3, 11.0})
        CHECK(curvature(c, s) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(c.total_turning() == doctest::Approx(2.0 * M_PI).epsilon(1e-4));
    // unit-speed parametrization at the nodes
    for (double s : {0.3, 4.0, 9.9}) {
        const Vec2 t = c.tangent(s);
        CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("ellipse: closed-form curvature at the major vertex") {
    // k = a b / (a^2 sin^2 + b^2 cos^2)^{3/2} evaluated at (a, 0) gives
    // a / b^2 = 2 for semi-axes (2, 1).
    const auto e = BoundaryCurve::ellipse(2.0, 1.0, 1024);
    const auto bp = [&] {
        // the node nearest (2, 0)
        double best = 1e9;
        double s_best = 0.0;
        for (int i = 0; i < e.n(); ++i) {
            const double s = e.total_length() * i / e.n();
            const double d = (e.point(s) - Vec2{2.0, 0.0}).norm();
            if (d < best) {
                best = d;
                s_best = s;
            }
        }
        return s_best;
    }();
    CHECK(curvature(e, bp) == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(e.total_turning() == doctest::Approx(2.0 * M_PI).epsilon(1e-3));
    // spline-curvature cross-check
    CHECK(e.curvature_spline(bp) == doctest::Approx(2.0).epsilon(2e-3));
}

TEST_CASE("built-in square has a valid rounded-corner boundary") {
    const auto sq = BoundaryCurve::square(2.0, 1024);
    // perimeter slightly below 4 * side thanks to the rounded corners
    CHECK(sq.total_length() < 8.0);
    CHECK(sq.total_length() > 7.8);
    CHECK(sq.total_turning() == doctest::Approx(2.0 * M_PI).epsilon(1e-2));
    CHECK(sq.max_abs_curvature() < 1.0 / 0.03);
}

TEST_CASE("degenerate inputs are rejected") {
    std::vector<Vec2> few = {{0, 0}, {1, 0}, {1, 1}};
    CHECK_THROWS_AS(BoundaryCurve::from_points(few), DegenerateCurve);
    std::vector<Vec2> dup;
    for (int i = 0; i < 16; ++i) {
        const double a = 2.0 * M_PI * i / 16;
        dup.push_back({std::cos(a), std::sin(a)});
    }
    dup[5] = dup[4];
    CHECK_THROWS_AS(BoundaryCurve::from_points(dup), DegenerateCurve);
}

TEST_CASE("boundary coordinates on the unit circle") {
    const auto tc = TubularCoords::build(BoundaryCurve::circle(1.0, 512));
    CHECK(tc.t0 > 0.0);
    CHECK(1.0 - tc.t0 * tc.curve.max_abs_curvature() > 0.0);

    const double th0 = 1.234;
    const Vec2 x{0.9 * std::cos(th0), 0.9 * std::sin(th0)};
    const auto bp = to_boundary_coords(tc, x);
    CHECK(bp.t == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(bp.s == doctest::Approx(th0).epsilon(1e-6));

    // boundary point: t = 0
    const auto on = to_boundary_coords(tc, tc.curve.point(2.0));
    CHECK(on.t == doctest::Approx(0.0).epsilon(1e-9));

    // far inside: outside the collar
    CHECK_THROWS_AS(to_boundary_coords(tc, Vec2{0.0, 0.0}), OutsideCollar);
    // outside the domain
    CHECK_THROWS_AS(to_boundary_coords(tc, Vec2{1.05, 0.0}), OutsideCollar);

    // (s, 0) maps to M(s)
    const Vec2 m = from_boundary_coords(tc, 2.0, 0.0);
    CHECK((m - tc.curve.point(2.0)).norm() < 1e-12);
    CHECK_THROWS_AS(from_boundary_coords(tc, 1.0, tc.t0), OutsideCollar);
}

TEST_CASE("roundtrip identity on random collar points") {
    const auto tc = TubularCoords::build(BoundaryCurve::ellipse(1.5, 1.0, 1024));
    std::mt19937 rng(5u);
    std::uniform_real_distribution<double> us(0.0, tc.curve.total_length());
    std::uniform_real_distribution<double> ut(0.0, 0.95 * tc.t0);
    for (int i = 0; i < 40; ++i) {
        const double s = us(rng), t = ut(rng);
        const Vec2 x = from_boundary_coords(tc, s, t);
        const auto bp = to_boundary_coords(tc, x);
        const Vec2 x2 = from_boundary_coords(tc, bp.s, bp.t);
        CHECK((x - x2).norm() < 1e-10);
    }
}

TEST_CASE("gauge normalization for a constant field on the disk") {
    const auto tc = TubularCoords::build(BoundaryCurve::circle(1.0, 512));
    const double b = 1.7;
    auto A = [b](Vec2 x) { return Vec2{-0.5 * b * x.y, 0.5 * b * x.x}; };
    const double S0 = 1.0;
    const auto g = gauge_normalize(tc, A, S0, 0.6, 1.4, 0.3 * tc.t0, 65, 49);
    CHECK(g.B0 == doctest::Approx(b).epsilon(1e-6));

    // second component vanishes by construction; A1 = -B0 t + beta with
    // beta = b t^2 / 2 exactly on the disk
    for (int j : {5, 20, 48})
        for (int i : {0, 30, 64}) {
            const double t = g.t_nodes[j];
            CHECK(g.beta_at(i, j) == doctest::Approx(0.5 * b * t * t).epsilon(2e-3));
        }

    // sup |beta| <= C (S^2 + T^2) with refinement-stable C
    const double S = 0.8, T = 0.3 * tc.t0;
    const double C1 = g.sup_beta() / (S * S + T * T);
    const auto g2 = gauge_normalize(tc, A, S0, 0.6, 1.4, T, 97, 73);
    const double C2 = g2.sup_beta() / (S * S + T * T);
    CHECK(C1 == doctest::Approx(C2).epsilon(0.2));

    // curl of the normalized field reproduces (1 - t k) B
    const int i = 32, j = 24;
    const double t = g.t_nodes[j];
    const double k = tc.curve.curvature(g.s_nodes[i]);
    CHECK(g.curl_at(i, j) == doctest::Approx((1.0 - t * k) * b).epsilon(1e-3));
}

TEST_CASE("pure gradient input normalizes to zero field") {
    const auto tc = TubularCoords::build(BoundaryCurve::circle(1.0, 512));
    auto A = [](Vec2 x) { return Vec2{2.0 * x.x, -1.0}; }; // grad(x^2 - y)
    const auto g = gauge_normalize(tc, A, 1.0, 0.6, 1.4, 0.3 * tc.t0, 65, 49);
    CHECK(std::abs(g.B0) < 1e-8);
    for (int j : {10, 30})
        for (int i : {10, 50})
            CHECK(std::abs(g.curl_at(i, j)) < 1e-3);
}

TEST_CASE("window deeper than the collar is rejected") {
    const auto tc = TubularCoords::build(BoundaryCurve::circle(1.0, 256));
    auto A = [](Vec2) { return Vec2{0.0, 0.0}; };
    CHECK_THROWS_AS(gauge_normalize(tc, A, 1.0, 0.5, 1.5, 2.0 * tc.t0),
                    WindowTooDeep);
}
