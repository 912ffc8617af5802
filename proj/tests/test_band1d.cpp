#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "robinband/band1d.hpp"
#include "robinband/errors.hpp"

using namespace robinband;
using namespace robinband::band1d;

// Fine-grid shooting oracle values (computed by bisecting the Neumann
// minimum identity mu_1(0, xi0) = xi0^2 at ODE tolerance 1e-12).
static constexpr double kXi0 = 0.76818365313917;
static constexpr double kTheta0 = 0.59010612494979;

TEST_CASE("even-extension anchors mu_j(0,0) = 4j-3") {
    auto disc = HalfLineDiscretization::for_xi(0.0, 0.01);
    for (int j = 1; j <= 4; ++j)
        CHECK(mu_fd(j, {0.0, 0.0}, disc) ==
              doctest::Approx(4.0 * j - 3.0).epsilon(1e-8));
}

TEST_CASE("shooting scheme reproduces the anchors") {
    auto disc = HalfLineDiscretization::for_xi(0.0, 0.02);
    CHECK(mu_shooting(1, {0.0, 0.0}, disc) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mu_shooting(2, {0.0, 0.0}, disc) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("cross-validated mu agrees across schemes") {
    auto disc = HalfLineDiscretization::for_xi(1.5, 0.015);
    CHECK_NOTHROW(mu_cross_validated(1, {-1.0, 1.5}, disc, 1e-6));
    CHECK_NOTHROW(mu_cross_validated(3, {0.7, -0.5}, disc, 1e-6));
}

TEST_CASE("de Gennes minimum against the shooting oracle") {
    auto disc = HalfLineDiscretization::for_xi(2.0, 0.02);
    const auto th = theta(0.0, 1, disc);
    CHECK(std::abs(th.theta - kTheta0) < 1e-6);
    CHECK(std::abs(th.xi_min - kXi0) < 1e-6);
    // minimum identity Theta0 = xi0^2
    CHECK(std::abs(th.theta - th.xi_min * th.xi_min) < 1e-5);
    // the band is flat near the minimum
    CHECK(mu_fd(1, {0.0, 0.7649}, disc) == doctest::Approx(0.5901).epsilon(5e-4));
}

TEST_CASE("theta is monotone in gamma and above 1 for the second band") {
    auto disc = HalfLineDiscretization::for_xi(2.0, 0.02);
    CHECK(theta(-1.0, 1, disc).theta < theta(0.0, 1, disc).theta);
    CHECK(theta(0.0, 2, disc).theta > 1.0);
}

TEST_CASE("xi -> +inf band limit approaches 2j-1") {
    auto disc = HalfLineDiscretization::for_xi(0.0, 0.02);
    CHECK(xi_inf_limit(1, 0.0, disc) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(xi_inf_limit(2, 0.0, disc) == doctest::Approx(3.0).epsilon(1e-5));
    // the value approaches from below for j = 1
    CHECK(xi_inf_limit(1, 0.0, disc) < 1.0 + 1e-7);
}

TEST_CASE("xi_roots brackets the sublevel set") {
    auto disc = HalfLineDiscretization::for_xi(2.0, 0.02);
    const auto r = xi_roots(1, 0.0, 0.8, disc);
    CHECK(r.lo < kXi0);
    CHECK(r.hi > kXi0);
    CHECK(mu_fd(1, {0.0, r.lo}, HalfLineDiscretization::for_xi(r.lo, 0.02)) ==
          doctest::Approx(0.8).epsilon(1e-6));
    CHECK(mu_fd(1, {0.0, r.hi}, HalfLineDiscretization::for_xi(r.hi, 0.02)) ==
          doctest::Approx(0.8).epsilon(1e-6));

    CHECK_THROWS_AS(xi_roots(1, 0.0, 0.5, disc), EmptyInterval);
    CHECK_THROWS_AS(xi_roots(1, 0.0, 1.5, disc), UnboundedSublevel);
}

TEST_CASE("eigenfunction contracts") {
    auto disc = HalfLineDiscretization::for_xi(0.0, 0.01);
    const auto ef = eigenfunction(1, {0.0, 0.0}, disc);
    double mass = 0.0;
    for (size_t i = 0; i < ef.u.size(); ++i) mass += ef.w[i] * ef.u[i] * ef.u[i];
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ef.discrete_residual < 1e-10);
    // Gaussian tail: mass beyond xi + 8 below e^-8
    CHECK(ef.tail_mass(8.0) < std::exp(-8.0));
    // ground state positive at the boundary
    CHECK(ef.value0() > 0.0);
}

TEST_CASE("boundary value squared: symmetry anchor and a-priori bound") {
    auto disc = HalfLineDiscretization::for_xi(0.0, 0.01);
    const double u0sq = boundary_value_sq(1, {0.0, 0.0}, disc);
    CHECK(u0sq == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-6));

    auto disc1 = HalfLineDiscretization::for_xi(1.0, 0.02);
    const double v = boundary_value_sq(1, {-1.0, 1.0}, disc1);
    const double mu1 = mu_fd(1, {-1.0, 1.0}, disc1);
    CHECK(v <= 4.0 * mu1 + 8.0 + 2.0);

    // strong repulsive Robin pushes the boundary value toward Dirichlet 0
    CHECK(boundary_value_sq(1, {5.0, 0.0}, disc) < 0.1);
}

TEST_CASE("Robin row holds at the boundary node") {
    auto disc = HalfLineDiscretization::for_xi(1.0, 0.005);
    const auto ef = eigenfunction(1, {-1.0, 1.0}, disc);
    // one-sided second-order derivative against gamma u(0)
    const double d = disc.spacing();
    const double du =
        (-3.0 * ef.u[0] + 4.0 * ef.u[1] - ef.u[2]) / (2.0 * d);
    double umax = 0.0;
    for (double x : ef.u) umax = std::max(umax, std::abs(x));
    CHECK(std::abs(du - (-1.0) * ef.u[0]) < 1e-3 * umax);
}

TEST_CASE("far-left band values blow up") {
    auto disc = HalfLineDiscretization::for_xi(-6.0, 0.02);
    for (double g : {-2.0, 0.0, 2.0}) CHECK(mu_fd(1, {g, -6.0}, disc) > 30.0);
}

TEST_CASE("Gaussian closure of mu_1 to 1") {
    // log|mu_1 - 1| regressed against xi^2 on [2, 4]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double xi = 2.0; xi <= 4.001; xi += 0.25) {
        auto d = HalfLineDiscretization::for_xi(xi, 0.01);
        const double m = mu_fd(1, {0.0, xi}, d);
        const double y = std::log(std::abs(m - 1.0));
        const double x = xi * xi;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope > -1.3);
    CHECK(slope < -0.7);
}

TEST_CASE("weighted Gaussian decay norm is finite and refinement stable") {
    // H^1 norm of e^{eps (t-xi)^2 / 2} u on t - xi >= 3, eps = 0.5
    auto weighted = [](const Eigenfunction& ef, double xi) {
        double sum = 0.0;
        for (size_t i = 1; i + 1 < ef.u.size(); ++i) {
            if (ef.t[i] - xi < 3.0) continue;
            const double w = std::exp(0.25 * (ef.t[i] - xi) * (ef.t[i] - xi));
            const double du =
                (ef.u[i + 1] * std::exp(0.25 * (ef.t[i + 1] - xi) *
                                        (ef.t[i + 1] - xi)) -
                 ef.u[i - 1] * std::exp(0.25 * (ef.t[i - 1] - xi) *
                                        (ef.t[i - 1] - xi))) /
                (ef.t[i + 1] - ef.t[i - 1]);
            sum += ef.w[i] * (w * ef.u[i] * w * ef.u[i] + du * du);
        }
        return std::sqrt(sum);
    };
    const double xi = 1.0;
    auto d1 = HalfLineDiscretization::for_xi(xi, 0.02);
    auto d2 = HalfLineDiscretization::for_xi(xi, 0.01);
    const auto e1 = eigenfunction(1, {0.0, xi}, d1);
    const auto e2 = eigenfunction(1, {0.0, xi}, d2);
    REQUIRE(e1.mu < 1.0);
    const double n1 = weighted(e1, xi), n2 = weighted(e2, xi);
    CHECK(std::isfinite(n1));
    CHECK(n1 == doctest::Approx(n2).epsilon(0.05));
}

TEST_CASE("doubling the truncation length is inert") {
    auto d = HalfLineDiscretization::for_xi(0.0, 0.02);
    auto d2 = d;
    d2.L *= 2.0;
    d2.n *= 2;
    CHECK(std::abs(mu_fd(1, {0.0, 0.0}, d) - mu_fd(1, {0.0, 0.0}, d2)) < 1e-10);
}

TEST_CASE("band table: anchors, monotonicity audit, interpolation, io") {
    auto disc = HalfLineDiscretization::for_xi(6.0, 0.02);
    const auto table = band_table({-2.0, -1.0, 0.0, 1.0},
                                  {-4.0, -2.0, 0.0, 1.0, 2.0, 4.0, 6.0}, 2,
                                  disc, 2);
    CHECK(table.at(1, 2, 2) == doctest::Approx(1.0).epsilon(1e-7)); // (0,0)
    CHECK(table.at(2, 2, 2) == doctest::Approx(5.0).epsilon(1e-7));
    CHECK_NOTHROW(table.audit());

    // interpolation against a direct solve at an off-grid point
    auto fine = band_table({0.0}, [] {
        std::vector<double> xs;
        for (double x = -1.0; x <= 2.0001; x += 0.02) xs.push_back(x);
        return xs;
    }(), 1, disc, 2);
    const double xq = 0.513;
    const double direct =
        mu_fd(1, {0.0, xq}, HalfLineDiscretization::for_xi(xq, 0.02));
    CHECK(fine.interp(1, 0.0, xq) == doctest::Approx(direct).epsilon(1e-3));

    const std::string path = "band_table_test.txt";
    table.save(path);
    const auto loaded = BandTable::load(path);
    CHECK(loaded.p_max == table.p_max);
    CHECK(loaded.at(1, 2, 2) == doctest::Approx(table.at(1, 2, 2)).epsilon(1e-14));
    std::remove(path.c_str());
}

TEST_CASE("random-node scheme agreement sample") {
    std::mt19937 rng(20240731u);
    std::uniform_real_distribution<double> ug(-2.0, 2.0), ux(-4.0, 6.0);
    std::uniform_int_distribution<int> uj(1, 4);
    for (int i = 0; i < 12; ++i) {
        const int j = uj(rng);
        const double g = ug(rng), x = ux(rng);
        auto d = HalfLineDiscretization::for_xi(x, 0.015);
        CHECK(std::abs(mu_fd(j, {g, x}, d) - mu_shooting(j, {g, x}, d)) < 1e-6);
    }
}

TEST_CASE("discretization preconditions are enforced") {
    HalfLineDiscretization d;
    d.L = 5.0;
    d.n = 400;
    CHECK_THROWS_AS(mu_fd(1, {0.0, 0.0}, d), Error); // L < |xi| + 10
    auto ok = HalfLineDiscretization::for_xi(0.0, 0.02);
    CHECK_THROWS_AS(mu_fd(0, {0.0, 0.0}, ok), Error);
    CHECK_THROWS_AS(mu_fd(ok.n, {0.0, 0.0}, ok), Error); // j > n/4
}
