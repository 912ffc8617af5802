#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "robinband/band1d.hpp"
#include "robinband/errors.hpp"
#include "robinband/harness.hpp"
#include "robinband/model_spectra.hpp"
#include "robinband/semiclassical.hpp"
#include "robinband/solver2d.hpp"
#include "robinband/util.hpp"

// The acceptance suite: exact symmetry anchors, oracle agreement, model
// equivalences, and semiclassical convergence trends, each with a pinned
// tolerance and a wall-clock budget.

namespace robinband::harness {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Fine-grid shooting oracle (independent Prufer integration, bisected on
// the Neumann minimum identity mu_1(0, xi0) = xi0^2).
constexpr double kXi0 = 0.76818365313917;
constexpr double kTheta0 = 0.59010612494979;
// int (mu_1(0,xi) - 1)_- dxi from the same oracle
constexpr double kNeumannDensity = 0.523079284993;

double now_s() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Criterion {
    Report& report;
    std::string name;
    double budget_s;
    double started = 0.0;
    bool pass = true;
    std::ostringstream detail;

    Criterion(Report& r, std::string n, double budget)
        : report(r), name(std::move(n)), budget_s(budget), started(now_s()) {}

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }

    void finish() {
        const double elapsed = now_s() - started;
        if (elapsed > budget_s) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << "runtime "
                   << elapsed << " s over the " << budget_s << " s budget";
        }
        std::ostringstream d;
        d << detail.str();
        report.add_timing(name, elapsed);
        report.add_check(name, pass, d.str());
    }
};

void criterion_1_anchors(Report& rep) {
    Criterion c(rep, "criterion-01-symmetry-anchors", 1.0);
    auto disc = band1d::HalfLineDiscretization::for_xi(0.0, 0.01);
    for (int j = 1; j <= 4; ++j) {
        const double v = band1d::mu_fd(j, {0.0, 0.0}, disc);
        c.expect(std::abs(v - (4.0 * j - 3.0)) < 1e-7,
                 "mu_" + std::to_string(j) + "(0,0) = " + std::to_string(v));
    }
    const double u0sq = band1d::boundary_value_sq(1, {0.0, 0.0}, disc);
    c.expect(std::abs(u0sq - 2.0 / std::sqrt(kPi)) < 1e-6,
             "u_1(0;0)^2 = " + std::to_string(u0sq));
    c.finish();
}

void criterion_2_band_oracles(Report& rep) {
    Criterion c(rep, "criterion-02-band-oracle-agreement", 30.0);
    std::mt19937 rng(1234u);
    std::uniform_real_distribution<double> ug(-2.0, 2.0), ux(-4.0, 6.0);
    std::uniform_int_distribution<int> uj(1, 4);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int j = uj(rng);
        const double g = ug(rng), x = ux(rng);
        auto d = band1d::HalfLineDiscretization::for_xi(x, 0.015);
        worst = std::max(worst, std::abs(band1d::mu_fd(j, {g, x}, d) -
                                         band1d::mu_shooting(j, {g, x}, d)));
    }
    c.expect(worst < 1e-6, "fd/shooting worst gap " + std::to_string(worst));

    auto disc = band1d::HalfLineDiscretization::for_xi(2.0, 0.02);
    const auto th = band1d::theta(0.0, 1, disc);
    c.expect(std::abs(th.theta - kTheta0) < 1e-6,
             "Theta(0) off the oracle by " + std::to_string(th.theta - kTheta0));
    c.expect(std::abs(th.xi_min - kXi0) < 1e-6,
             "xi_0 off the oracle by " + std::to_string(th.xi_min - kXi0));
    c.expect(std::abs(th.theta - th.xi_min * th.xi_min) < 1e-5,
             "minimum identity defect");
    c.finish();
}

void criterion_3_monotonicity(Report& rep, int threads) {
    Criterion c(rep, "criterion-03-monotonicity-and-limits", 30.0);
    auto disc = band1d::HalfLineDiscretization::for_xi(6.0, 0.02);
    const auto table = band1d::band_table({-2.0, -1.0, 0.0, 1.0},
                                          util::linspace(-4.0, 6.0, 101), 3,
                                          disc, threads);
    try {
        table.audit();
    } catch (const Error& e) {
        c.expect(false, e.what());
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double xi = 2.0; xi <= 4.001; xi += 0.25) {
        auto d = band1d::HalfLineDiscretization::for_xi(xi, 0.01);
        const double m = band1d::mu_fd(1, {0.0, xi}, d);
        const double y = std::log(std::abs(m - 1.0));
        sx += xi * xi;
        sy += y;
        sxx += xi * xi * xi * xi;
        sxy += xi * xi * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    c.expect(slope > -1.3 && slope < -0.7,
             "decay slope " + std::to_string(slope));

    auto far = band1d::HalfLineDiscretization::for_xi(-6.0, 0.02);
    for (double g : {-2.0, -1.0, 0.0, 1.0, 2.0})
        c.expect(band1d::mu_fd(1, {g, -6.0}, far) > 30.0,
                 "mu_1(" + std::to_string(g) + ", -6) too small");
    c.finish();
}

void criterion_4_fiber_direct(Report& rep) {
    Criterion c(rep, "criterion-04-fiber-direct-equivalence", 300.0);
    struct Case {
        double gamma, alpha, T;
        const char* tag;
    };
    // Three half-plane strips plus the Neumann cylinder at another shape.
    const Case cases[] = {{0.0, 1.0, 4.5, "neumann-strip"},
                          {-1.0, 0.5, 4.5, "robin-strip"},
                          {-1.0, 1.0, 4.5, "robin-weak-strip"},
                          {0.0, 1.0, 6.0, "cylinder"}};
    for (const auto& k : cases) {
        model::CylinderModel m{0.1, 1.0, 2.0, k.T, k.gamma, k.alpha};
        try {
            const auto cmp = model::cylinder_spectrum_checked(m, 20, 1e-3);
            c.expect(cmp.max_rel_mismatch < 1e-3,
                     std::string(k.tag) + " mismatch " +
                         std::to_string(cmp.max_rel_mismatch));
        } catch (const Error& e) {
            c.expect(false, std::string(k.tag) + ": " + e.what());
        }
    }
    c.finish();
}

void criterion_5_lieb_thirring(Report& rep) {
    Criterion c(rep, "criterion-05-lieb-thirring", 120.0);
    for (double g : {0.5, 1.0, 2.0})
        for (double a : {0.5, 1.0, 2.0}) {
            const auto r = model::lt_bound_check_d0(a, g);
            c.expect(r.holds && std::abs(r.lhs - 0.5 * r.rhs) <=
                                    1e-12 * std::max(1.0, r.rhs),
                     "d0 equality fails at gamma=" + std::to_string(g));
        }
    for (double a : {0.5, 1.0, 2.0})
        for (int d : {1, 2, 3}) {
            const double lhs = model::lt_classical_constant(a, 1) *
                               model::lt_classical_constant(a + 0.5, d - 1);
            const double rhs = model::lt_classical_constant(a, d);
            c.expect(std::abs(lhs - rhs) <= 1e-12 * rhs, "recursion identity");
        }
    auto bump = [](double x) {
        const double w = 0.15;
        auto s = [&](double y) { return 0.5 * (1.0 + std::tanh(y / w)); };
        return 3.0 * (s(x + 1.0) - s(x - 1.0));
    };
    try {
        const auto d1 = model::lt_bound_check_d1(1.0, bump, 6.0, 6.0, 0.0625);
        c.expect(d1.holds, "d1 bump violated");
        c.detail << (c.detail.str().empty() ? "" : "; ") << "d1 margin "
                 << 100.0 * (1.0 - d1.lhs / d1.rhs) << "%";
    } catch (const Error& e) {
        c.expect(false, e.what());
    }
    c.finish();
}

void criterion_6_torus(Report& rep) {
    Criterion c(rep, "criterion-06-torus-landau", 120.0);
    for (int n : {1, 5, 20}) {
        model::TorusModel t{std::sqrt(2.0 * kPi * n)};
        const int below = model::torus_count_below(t, 0.9, 0.05);
        const int mult = model::torus_count_below(t, 1.05, 0.05) - below;
        const int upto_gap = model::torus_count_below(t, 2.8, 0.05);
        c.expect(below == 0, "n=" + std::to_string(n) + ": states below 0.9");
        c.expect(mult == n, "n=" + std::to_string(n) + ": multiplicity " +
                                std::to_string(mult));
        c.expect(upto_gap == n,
                 "n=" + std::to_string(n) + ": gap to 2.8 violated");
    }
    c.finish();
}

void criterion_7_dirichlet_square(Report& rep) {
    Criterion c(rep, "criterion-07-dirichlet-square", 120.0);
    try {
        const int c1 = model::dirichlet_square_count(1.0, 5.0, 0.05);
        c.expect(c1 == 0, "N(1, R=5) = " + std::to_string(c1));
        const int c29 = model::dirichlet_square_count(2.9, 10.0, 0.05);
        const int cap = static_cast<int>(100.0 / (2.0 * kPi)) + 1;
        c.expect(c29 <= cap, "N(2.9, R=10) = " + std::to_string(c29) +
                                 " over cap " + std::to_string(cap));
    } catch (const Error& e) {
        c.expect(false, e.what());
    }
    c.finish();
}

solver2d::ProblemSpec disk_spec(double h, double gamma, double alpha,
                                double lambda) {
    solver2d::ProblemSpec s;
    s.domain = solver2d::Domain::Disk;
    s.size = 1.0;
    s.h = h;
    s.b = 1.0;
    s.gamma = gamma;
    s.alpha = alpha;
    s.lambda = lambda;
    return s;
}

void criterion_8_energy_convergence(Report& rep) {
    Criterion c(rep, "criterion-08-energy-convergence", 1800.0);
    auto disc = band1d::HalfLineDiscretization::for_xi(6.5, 0.02);
    const std::vector<double> h_list{0.1, 0.05, 0.025};

    // Neumann branch; the reference limit must also agree with the
    // independent shooting oracle.
    const double limit_n =
        semicl::density_energy_direct(0.0, 1.0, 1.0, disc, 1e-7);
    c.expect(std::abs(limit_n - kNeumannDensity) < 5e-5,
             "Neumann limit drifted from the oracle");
    const auto rep_n =
        solver2d::convergence_study(disk_spec(0.1, 0.0, 1.0, 1.0), h_list,
                                    limit_n, 0.0);
    for (size_t i = 1; i < rep_n.rows.size(); ++i)
        c.expect(rep_n.rows[i].err_E < rep_n.rows[i - 1].err_E,
                 "Neumann error not decreasing");
    c.expect(rep_n.rows.back().err_E <= 0.10,
             "Neumann final error " + std::to_string(rep_n.rows.back().err_E));

    const double limit_r =
        semicl::density_energy_direct(-1.0, 1.0, 1.0, disc, 1e-7);
    const auto rep_r =
        solver2d::convergence_study(disk_spec(0.1, -1.0, 0.5, 1.0), h_list,
                                    limit_r, 0.0);
    for (size_t i = 1; i < rep_r.rows.size(); ++i)
        c.expect(rep_r.rows[i].err_E < rep_r.rows[i - 1].err_E,
                 "Robin error not decreasing");
    c.expect(rep_r.rows.back().err_E <= 0.15,
             "Robin final error " + std::to_string(rep_r.rows.back().err_E));
    c.finish();
}

void criterion_9_count_convergence(Report& rep) {
    Criterion c(rep, "criterion-09-count-convergence", 1800.0);
    auto disc = band1d::HalfLineDiscretization::for_xi(6.5, 0.02);
    const double limit_n =
        semicl::density_count_direct(-1.0, 1.0, 0.9, disc);
    const auto report =
        solver2d::convergence_study(disk_spec(0.1, -1.0, 0.5, 0.9),
                                    {0.1, 0.05, 0.025}, 0.0, limit_n);
    for (size_t i = 1; i < report.rows.size(); ++i)
        c.expect(report.rows[i].err_N < report.rows[i - 1].err_N,
                 "count error not decreasing");
    c.expect(report.rows.back().err_N <= 0.15,
             "final count error " + std::to_string(report.rows.back().err_N));
    c.finish();
}

void criterion_10_square_counting(Report& rep) {
    Criterion c(rep, "criterion-10-square-counting", 1200.0);
    const double inv2pi = 1.0 / (2.0 * kPi);
    struct Row {
        double T;
        int n;
        int N;
    };
    std::vector<Row> rows;
    for (int n : {6, 10, 15}) {
        const double T = std::sqrt(2.0 * kPi * n);
        solver2d::ProblemSpec s;
        s.domain = solver2d::Domain::Square;
        s.size = 1.0;
        s.b = 1.0;
        s.lambda = 1.0;
        s.h = 1.0 / (T * T);
        rows.push_back({T, n, solver2d::square_count_below(s, s.b * s.h)});
    }
    for (const auto& r : rows)
        c.expect(r.N >= r.n, "torus lower bracket fails at n=" +
                                 std::to_string(r.n));
    // Calibrate the boundary constant at the smallest size; the bracket
    // must then hold at the larger ones.
    const double C_fit =
        (rows[0].N - rows[0].T * rows[0].T * inv2pi) / rows[0].T;
    for (size_t i = 1; i < rows.size(); ++i)
        c.expect(rows[i].N <=
                     rows[i].T * rows[i].T * inv2pi + C_fit * rows[i].T + 1e-9,
                 "upper bracket fails at n=" + std::to_string(rows[i].n));
    double prev = 1e18;
    for (const auto& r : rows) {
        const double err = std::abs(r.N / (r.T * r.T) - inv2pi) / inv2pi;
        c.expect(err < prev, "h N error not decreasing");
        prev = err;
    }
    c.expect(prev <= 0.15, "final h N error " + std::to_string(prev));
    c.finish();
}

void criterion_11_functional_consistency(Report& rep, int threads) {
    Criterion c(rep, "criterion-11-functional-consistency", 60.0);
    auto disc = band1d::HalfLineDiscretization::for_xi(6.5, 0.02);
    const auto table = band1d::band_table({0.0},
                                          util::linspace(-4.0, 6.5, 526), 2,
                                          disc, threads);
    const auto curve = geometry::BoundaryCurve::circle(1.0, 256);
    const auto field = semicl::FieldOnBoundary::constant(1.0, curve.n());
    const auto trace = semicl::RobinTrace::constant(0.0, curve.n(), curve.ds());
    for (double lam : {0.7, 0.9}) {
        const double eps = 1e-3;
        const double Ep = semicl::energy_limit(curve, field, trace, lam + eps,
                                               1.0, table, 1e-7)
                              .value;
        const double Em = semicl::energy_limit(curve, field, trace, lam - eps,
                                               1.0, table, 1e-7)
                              .value;
        const double N =
            semicl::count_limit(curve, field, trace, lam, 1.0, table, 1e-7)
                .value;
        const double deriv = (Ep - Em) / (2.0 * eps);
        c.expect(std::abs(deriv / N - 1.0) < 0.01,
                 "derivative mismatch at lambda=" + std::to_string(lam));
    }

    auto d0 = band1d::HalfLineDiscretization::for_xi(0.0, 0.02);
    for (double g : {-1.0, 0.0, 1.0}) {
        const double J0 = semicl::spectral_sum(g, 1e-6, d0);
        double prevd = 1e18;
        for (double tau : {0.1, 0.01, 0.001}) {
            const double d = std::abs(semicl::spectral_sum(g + tau, 1e-6, d0) -
                                      J0);
            c.expect(d < prevd, "spectral sum continuity at gamma=" +
                                    std::to_string(g));
            prevd = d;
        }
    }
    c.finish();
}

void criterion_12_form_bottom(Report& rep) {
    Criterion c(rep, "criterion-12-semibounded-probe", 120.0);
    solver2d::ProblemSpec s = disk_spec(0.1, 0.0, 1.0, 1.0);
    const int nth = 384;
    std::vector<double> g(nth, 0.0);
    const double ds = 2.0 * kPi / nth;
    for (int k = 0; k < nth; ++k) {
        const double s0 = k * ds, s1 = (k + 1) * ds;
        const double lo = std::max(s0, 0.0), hi = std::min(s1, 0.1);
        if (hi > lo) g[k] = -50.0 * (hi - lo) / ds;
    }
    s.gamma_theta = g;
    try {
        const auto pr = solver2d::form_lower_bound_probe(s, 128, nth);
        c.expect(std::isfinite(pr.bottom), "bottom not finite");
        const double ref =
            std::max(std::abs(pr.bottom_refined), 0.1 * s.b * s.h);
        const double rel = std::abs(pr.bottom - pr.bottom_refined) / ref;
        c.expect(rel <= 0.05, "refinement drift " + std::to_string(rel));
        c.detail << (c.detail.str().empty() ? "" : "; ") << "bottom "
                 << pr.bottom_refined;
    } catch (const Error& e) {
        c.expect(false, e.what());
    }
    c.finish();
}

} // namespace

RunReport validate_all(Budget budget, const std::string& out_dir,
                       int threads) {
    RunReport out;
    const double t0 = now_s();
    out.report.set("suite", budget == Budget::Full ? "full" : "quick");

    criterion_1_anchors(out.report);
    criterion_2_band_oracles(out.report);
    criterion_3_monotonicity(out.report, threads);
    criterion_4_fiber_direct(out.report);
    criterion_5_lieb_thirring(out.report);
    criterion_6_torus(out.report);
    criterion_7_dirichlet_square(out.report);
    if (budget == Budget::Full) {
        criterion_8_energy_convergence(out.report);
        criterion_9_count_convergence(out.report);
        criterion_10_square_counting(out.report);
    }
    criterion_11_functional_consistency(out.report, threads);
    criterion_12_form_bottom(out.report);

    out.report.add_timing("total", now_s() - t0);
    out.ok = out.report.all_passed();
    std::filesystem::create_directories(out_dir);
    out.report.save((std::filesystem::path(out_dir) / "validate_report.txt")
                        .string());
    return out;
}

} // namespace robinband::harness
