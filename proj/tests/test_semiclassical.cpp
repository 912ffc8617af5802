#include <cmath>

#include "doctest.h"
#include "robinband/errors.hpp"
#include "robinband/semiclassical.hpp"
#include "robinband/util.hpp"

using namespace robinband;
using namespace robinband::semicl;
using band1d::BandTable;
using band1d::HalfLineDiscretization;

namespace {

// Shooting-oracle reference: int (mu_1(0,xi) - 1)_- dxi.
constexpr double kNeumannDensity = 0.523079284993;

const BandTable& shared_table() {
    static const BandTable table = [] {
        auto disc = HalfLineDiscretization::for_xi(6.5, 0.02);
        return band1d::band_table({-2.0, -1.0, 0.0, 1.0},
                                  util::linspace(-5.0, 6.5, 461), 3, disc, 2);
    }();
    return table;
}

} // namespace

TEST_CASE("density_energy anchors") {
    const auto& table = shared_table();
    // level 0: empty negative part
    CHECK(density_energy(0.0, 1.0, 0.0, table, 1e-8) == doctest::Approx(0.0));
    // Neumann level 1 matches the independent shooting oracle
    CHECK(density_energy(0.0, 1.0, 1.0, table, 1e-6) ==
          doctest::Approx(kNeumannDensity).epsilon(2e-4));
    CHECK(density_energy_direct(0.0, 1.0, 1.0,
                                HalfLineDiscretization::for_xi(0.0, 0.02),
                                1e-7) ==
          doctest::Approx(kNeumannDensity).epsilon(2e-5));
    CHECK_THROWS_AS(density_energy(0.0, 1.0, 1.5, table, 1e-6),
                    LevelAboveField);
}

TEST_CASE("only the first band contributes at Neumann level 1") {
    const auto& table = shared_table();
    CHECK(p_truncation(0.0, 1.0, table) == 1);
    CHECK(p_truncation(-1.0, 1.0, table) == 1); // Theta_2(-1) = 1.88 > 1
    CHECK(p_truncation(-2.0, 1.0, table) >= 1);
    // p0 nondecreasing as gamma_min decreases
    int prev = 0;
    for (double g : {0.0, -1.0, -2.0}) {
        const int p0 = p_truncation(g, 1.0, table);
        CHECK(p0 >= prev);
        prev = p0;
    }
    CHECK_THROWS_AS(p_truncation(0.0, 20.0, table), TableTooSmall);
}

TEST_CASE("density integral is stable under grid refinement") {
    auto disc_c = HalfLineDiscretization::for_xi(0.0, 0.04);
    auto disc_f = HalfLineDiscretization::for_xi(0.0, 0.02);
    const double a = density_energy_direct(0.0, 1.0, 1.0, disc_c, 1e-6);
    const double b = density_energy_direct(0.0, 1.0, 1.0, disc_f, 1e-6);
    CHECK(std::abs(a - b) < 1e-4);
}

TEST_CASE("xi window properties") {
    const auto& table = shared_table();
    const double k4 = xi_window(0.0, 0.8, 1e-4, table);
    const double k8 = xi_window(0.0, 0.8, 1e-8, table);
    CHECK(k8 >= k4);
    // the window clears the sublevel set
    CHECK(table.interp(1, 0.0, -std::min(k4, 5.0)) > 0.8);
    // tail estimate below tolerance: the fitted envelope integral at K
    const double C = 2.0; // generous envelope constant
    CHECK(C * std::exp(-k8 * k8) / 2.0 < 1e-6);
}

TEST_CASE("energy limit: constant data reduces to the density formula") {
    const auto& table = shared_table();
    const auto curve = geometry::BoundaryCurve::circle(1.0, 256);
    const auto field = FieldOnBoundary::constant(1.0, curve.n());
    const auto trace = RobinTrace::constant(-1.0, curve.n(), curve.ds());

    // alpha > 1/2: the Neumann branch, independent of gamma
    const auto a1 = energy_limit(curve, field, trace, 1.0, 0.75, table, 1e-6);
    CHECK(a1.value == doctest::Approx(kNeumannDensity).epsilon(2e-4));
    const auto zero = RobinTrace::constant(0.0, curve.n(), curve.ds());
    const auto a2 = energy_limit(curve, field, zero, 1.0, 0.5, table, 1e-6);
    // branch agreement at gamma = 0
    CHECK(a2.value == doctest::Approx(a1.value).epsilon(1e-8));
    // attractive Robin strictly exceeds the Neumann value
    const auto a3 = energy_limit(curve, field, trace, 1.0, 0.5, table, 1e-6);
    CHECK(a3.value > a1.value + 0.5);

    CHECK_THROWS_AS(energy_limit(curve, field, trace, 1.2, 0.75, table, 1e-6),
                    LevelAboveField);
}

TEST_CASE("count limit preconditions and monotonicity") {
    const auto& table = shared_table();
    const auto curve = geometry::BoundaryCurve::circle(1.0, 256);
    const auto field = FieldOnBoundary::constant(1.0, curve.n());
    const auto trace = RobinTrace::constant(0.0, curve.n(), curve.ds());
    CHECK_THROWS_AS(count_limit(curve, field, trace, 1.0, 0.75, table, 1e-6),
                    LevelNotBelowField);
    // empty sublevel below the de Gennes constant
    const auto none = count_limit(curve, field, trace, 0.5, 0.75, table, 1e-6);
    CHECK(none.value == doctest::Approx(0.0));
    double prev = 0.0;
    for (double lam : {0.7, 0.8, 0.9}) {
        const auto c = count_limit(curve, field, trace, lam, 0.75, table, 1e-6);
        CHECK(c.value >= prev);
        prev = c.value;
    }
}

TEST_CASE("field scaling: (b, lambda, gamma) -> (4b, 4 lambda, 2 gamma)") {
    const auto& table = shared_table();
    const auto curve = geometry::BoundaryCurve::circle(1.0, 128);
    const auto f1 = FieldOnBoundary::constant(1.0, curve.n());
    const auto f4 = FieldOnBoundary::constant(4.0, curve.n());
    const auto t1 = RobinTrace::constant(-1.0, curve.n(), curve.ds());
    const auto t2 = RobinTrace::constant(-2.0, curve.n(), curve.ds());
    const auto e1 = energy_limit(curve, f1, t1, 0.9, 0.5, table, 1e-7);
    const auto e4 = energy_limit(curve, f4, t2, 3.6, 0.5, table, 1e-7);
    CHECK(e4.value / e1.value == doctest::Approx(8.0).epsilon(1e-4));
}

TEST_CASE("alpha = 1/2 with unbounded gamma is flagged, not refused") {
    const auto& table = shared_table();
    const auto curve = geometry::BoundaryCurve::circle(1.0, 128);
    const auto field = FieldOnBoundary::constant(1.0, curve.n());
    auto trace = RobinTrace::from_samples(
        std::vector<double>(curve.n(), -1.0), curve.ds(), false);
    REQUIRE(!trace.essential_sup.has_value());
    const auto r = energy_limit(curve, field, trace, 0.9, 0.5, table, 1e-6);
    CHECK(r.unproven_regime);
    CHECK(r.value > 0.0);
}

TEST_CASE("mollification") {
    const int n = 256;
    const double ds = 2.0 * M_PI / n;
    // constant trace: unchanged exactly
    auto c = RobinTrace::constant(0.7, n, ds);
    const auto cm = mollify(c, 0.2);
    for (double g : cm.gamma_samples) CHECK(g == doctest::Approx(0.7).epsilon(1e-14));

    // step function: sup bound and L3 convergence
    std::vector<double> step(n, 0.0);
    for (int i = 0; i < n / 4; ++i) step[i] = -2.0;
    const auto s = RobinTrace::from_samples(step, ds);
    double prev_l3 = 1e9;
    for (double a : {0.4, 0.2, 0.1}) {
        const auto sm = mollify(s, a);
        CHECK(*sm.essential_sup <= *s.essential_sup + 1e-12);
        double l3 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = std::abs(sm.gamma_samples[i] - step[i]);
            l3 += d * d * d * ds;
        }
        l3 = std::cbrt(l3);
        CHECK(l3 < prev_l3);
        prev_l3 = l3;
    }
}

TEST_CASE("mollified-trace energy limits approach the rough-trace value") {
    const auto& table = shared_table();
    const auto curve = geometry::BoundaryCurve::circle(1.0, 256);
    const auto field = FieldOnBoundary::constant(1.0, curve.n());
    std::vector<double> step(curve.n(), 0.0);
    for (int i = 0; i < curve.n() / 4; ++i) step[i] = -1.5;
    const auto rough = RobinTrace::from_samples(step, curve.ds());
    const double target =
        energy_limit(curve, field, rough, 0.9, 0.5, table, 1e-6).value;
    double prev = 1e9;
    for (double a : {0.4, 0.2, 0.1, 0.05}) {
        const auto sm = mollify(rough, a);
        const double v =
            energy_limit(curve, field, sm, 0.9, 0.5, table, 1e-6).value;
        const double dev = std::abs(v - target);
        CHECK(dev <= prev + 1e-9);
        prev = dev;
    }
    CHECK(prev < 0.05 * target);
}

TEST_CASE("spectral sum continuity in gamma") {
    auto disc = HalfLineDiscretization::for_xi(0.0, 0.02);
    for (double g : {-1.0, 0.0, 1.0}) {
        const double J0 = spectral_sum(g, 1e-6, disc);
        double prev = 1e18;
        for (double tau : {0.1, 0.01, 0.001}) {
            const double d = std::abs(spectral_sum(g + tau, 1e-6, disc) - J0);
            CHECK(d < prev);
            prev = d;
        }
    }
}
