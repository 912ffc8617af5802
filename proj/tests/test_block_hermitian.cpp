#include <Eigen/Eigenvalues>
#include <random>

#include "doctest.h"
#include "robinband/block_hermitian.hpp"
#include "robinband/errors.hpp"

using namespace robinband;
using sparse::Block;
using sparse::BlockTridiag;
using sparse::Complex;
using sparse::DiagBlock;

namespace {

BlockTridiag random_bt(int rows, int bs, bool wrap, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    BlockTridiag P;
    P.diag.resize(rows);
    P.sub.resize(rows - 1);
    for (int k = 0; k < rows; ++k) {
        Block A(bs, bs);
        for (int i = 0; i < bs; ++i)
            for (int j = 0; j < bs; ++j) A(i, j) = Complex(uni(rng), uni(rng));
        P.diag[k] = 0.5 * (A + A.adjoint());
        if (k + 1 < rows) {
            DiagBlock s(bs);
            for (int i = 0; i < bs; ++i) s(i) = Complex(uni(rng), uni(rng));
            P.sub[k] = s;
        }
    }
    if (wrap) {
        P.wrap = DiagBlock(bs);
        for (int i = 0; i < bs; ++i) P.wrap(i) = Complex(uni(rng), uni(rng));
    }
    return P;
}

} // namespace

TEST_CASE("inertia counts match a dense eigensolver, with and without wrap") {
    for (bool wrap : {false, true}) {
        const auto P = random_bt(7, 4, wrap, wrap ? 21u : 20u);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P.dense());
        for (double sigma : {-2.5, -1.0, -0.2, 0.1, 0.8, 2.0}) {
            int exact = 0;
            for (int i = 0; i < es.eigenvalues().size(); ++i)
                if (es.eigenvalues()(i) < sigma) ++exact;
            CHECK(sparse::count_below(P, sigma) == exact);
        }
    }
}

TEST_CASE("factorization solves (P - sigma) x = b") {
    for (bool wrap : {false, true}) {
        const auto P = random_bt(6, 5, wrap, 31u);
        sparse::Factorization fac(P, 0.37);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Random(P.dim());
        const auto x = fac.solve(rhs);
        const double resid = (P.apply(x) - 0.37 * x - rhs).norm() / rhs.norm();
        CHECK(resid < 1e-12);
    }
}

TEST_CASE("shift-invert Lanczos certifies every eigenvalue below threshold") {
    const auto P = random_bt(8, 5, true, 40u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P.dense());
    const double thr = 0.3;
    const auto vals = sparse::eigenvalues_below(P, thr, -1.2);
    int exact = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < thr) {
            REQUIRE(exact < static_cast<int>(vals.size()));
            CHECK(vals[exact] ==
                  doctest::Approx(es.eigenvalues()(i)).epsilon(1e-9));
            ++exact;
        }
    CHECK(static_cast<int>(vals.size()) == exact);
}

TEST_CASE("clustered extraction resolves exact degeneracies") {
    // Block-diagonal matrix with an exactly fourfold eigenvalue at 1.
    const int bs = 4, rows = 4;
    BlockTridiag P;
    P.diag.assign(rows, Block::Zero(bs, bs));
    P.sub.assign(rows - 1, DiagBlock::Zero(bs));
    for (int k = 0; k < rows; ++k) {
        Eigen::VectorXd d(bs);
        d << 1.0, 2.0 + 0.1 * k, 3.0 + 0.05 * k, 7.0;
        P.diag[k] = d.asDiagonal().toDenseMatrix().cast<Complex>();
    }
    const auto vals = sparse::clustered_eigenvalues_below(P, 2.05, 0.0);
    // four copies of 1.0 and the 2.0 from block 0
    REQUIRE(vals.size() == 5);
    for (int i = 0; i < 4; ++i) CHECK(vals[i] == doctest::Approx(1.0));
    CHECK(vals[4] == doctest::Approx(2.0));
}

TEST_CASE("lowest eigenvalue by shift-invert with pull-in") {
    const auto P = random_bt(6, 6, false, 55u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P.dense());
    const double e = sparse::lowest_eigenvalue(P, -50.0, 1e-11);
    CHECK(e == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
}
