#include <Eigen/Eigenvalues>
#include <random>

#include "doctest.h"
#include "robinband/tridiag.hpp"

using namespace robinband::tridiag;

namespace {

SymTridiag random_matrix(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    SymTridiag m;
    m.diag.resize(n);
    m.off.resize(n - 1);
    for (auto& d : m.diag) d = uni(rng);
    for (auto& e : m.off) e = uni(rng);
    return m;
}

Eigen::VectorXd dense_eigenvalues(const SymTridiag& m) {
    const int n = m.n();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        M(i, i) = m.diag[i];
        if (i + 1 < n) M(i, i + 1) = M(i + 1, i) = m.off[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    return es.eigenvalues();
}

} // namespace

TEST_CASE("Sturm count matches dense eigensolver") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto m = random_matrix(40, seed);
        const auto ev = dense_eigenvalues(m);
        for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0, 5.0}) {
            int exact = 0;
            for (int i = 0; i < ev.size(); ++i)
                if (ev(i) < x) ++exact;
            CHECK(count_below(m, x) == exact);
        }
    }
}

TEST_CASE("bisection eigenvalues match dense to tolerance") {
    const auto m = random_matrix(60, 7u);
    const auto ev = dense_eigenvalues(m);
    for (int j : {1, 2, 10, 30, 60})
        CHECK(eigenvalue(m, j) == doctest::Approx(ev(j - 1)).epsilon(1e-10));
    const auto below = eigenvalues_below(m, 0.0);
    int exact = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (ev(i) < 0.0) ++exact;
    CHECK(static_cast<int>(below.size()) == exact);
}

TEST_CASE("inverse iteration eigenvector has small residual") {
    const auto m = random_matrix(80, 11u);
    const double lam = eigenvalue(m, 5);
    const auto v = eigenvector(m, lam);
    double resid = 0.0, scale = 0.0;
    for (int i = 0; i < m.n(); ++i) {
        double r = (m.diag[i] - lam) * v[i];
        if (i > 0) r += m.off[i - 1] * v[i - 1];
        if (i + 1 < m.n()) r += m.off[i] * v[i + 1];
        resid += r * r;
        scale = std::max(scale, std::abs(m.diag[i]));
    }
    CHECK(std::sqrt(resid) < 1e-9 * scale);
}

TEST_CASE("Gershgorin bounds contain the spectrum") {
    const auto m = random_matrix(30, 13u);
    const auto ev = dense_eigenvalues(m);
    auto [lo, hi] = gershgorin_bounds(m);
    CHECK(ev(0) >= lo);
    CHECK(ev(ev.size() - 1) <= hi);
}
