#include "robinband/block_hermitian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "robinband/errors.hpp"
#include "robinband/tridiag.hpp"

namespace robinband::sparse {

Vector BlockTridiag::apply(const Vector& x) const {
    const int R = rows(), bs = block_size();
    Vector y(dim());
    auto xseg = [&](int k) { return x.segment(static_cast<long>(k) * bs, bs); };
    for (int k = 0; k < R; ++k) {
        auto yk = y.segment(static_cast<long>(k) * bs, bs);
        yk = diag[k] * xseg(k);
        if (k > 0) yk += sub[k - 1].cwiseProduct(xseg(k - 1));
        if (k + 1 < R) yk += sub[k].conjugate().cwiseProduct(xseg(k + 1));
    }
    if (has_wrap()) {
        y.segment(0, bs) += wrap.cwiseProduct(xseg(R - 1));
        y.segment(static_cast<long>(R - 1) * bs, bs) +=
            wrap.conjugate().cwiseProduct(xseg(0));
    }
    return y;
}

Eigen::MatrixXcd BlockTridiag::dense() const {
    const int R = rows(), bs = block_size();
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int k = 0; k < R; ++k) {
        M.block(k * bs, k * bs, bs, bs) = diag[k];
        if (k + 1 < R) {
            M.block((k + 1) * bs, k * bs, bs, bs) = sub[k].asDiagonal();
            M.block(k * bs, (k + 1) * bs, bs, bs) =
                Block(sub[k].asDiagonal()).adjoint();
        }
    }
    if (has_wrap()) {
        M.block(0, (R - 1) * bs, bs, bs) = wrap.asDiagonal();
        M.block((R - 1) * bs, 0, bs, bs) = Block(wrap.asDiagonal()).adjoint();
    }
    return M;
}

namespace {

// Inertia of a dense Hermitian block: Householder tridiagonalization
// followed by a Sturm sign count at zero. Stable for indefinite blocks.
int negatives_of(const Block& S) {
    const int n = static_cast<int>(S.rows());
    if (n == 1) return S(0, 0).real() < 0.0 ? 1 : 0;
    Eigen::Tridiagonalization<Block> tri(S);
    tridiag::SymTridiag t;
    t.diag.resize(n);
    t.off.resize(n - 1);
    Eigen::VectorXd d = tri.diagonal();
    Eigen::VectorXd e = tri.subDiagonal();
    for (int i = 0; i < n; ++i) t.diag[i] = d(i);
    for (int i = 0; i < n - 1; ++i) t.off[i] = e(i);
    return tridiag::count_below(t, 0.0);
}

struct ChainResult {
    int negatives = 0;
    std::vector<Eigen::PartialPivLU<Block>> lu;
    std::vector<Block> W; // border couplings after elimination (wrap case)
    Eigen::PartialPivLU<Block> schur_lu;
    bool has_border = false;
};

// Shared elimination for counting and factorization. With a wrap the last
// block row is the border; otherwise the plain chain covers all rows.
ChainResult eliminate(const BlockTridiag& P, double sigma, bool keep) {
    const int R = P.rows();
    const int bs = P.block_size();
    const Block I = Block::Identity(bs, bs);
    const bool border = P.has_wrap();
    const int chain = border ? R - 1 : R;

    ChainResult out;
    out.has_border = border;
    Block S = P.diag[0] - sigma * I;
    Block W; // coupling of current chain row to the border
    Block Z; // border Schur accumulator
    if (border) {
        W = Block(P.wrap.asDiagonal());
        Z = P.diag[R - 1] - sigma * I;
    }
    if (keep) {
        out.lu.reserve(chain);
        if (border) out.W.reserve(chain);
    }

    for (int k = 0; k < chain; ++k) {
        out.negatives += negatives_of(S);
        Eigen::PartialPivLU<Block> lu(S);
        if (border) {
            Z.noalias() -= W.adjoint() * lu.solve(W);
            if (keep) out.W.push_back(W);
        }
        if (keep) out.lu.push_back(std::move(lu));
        const Eigen::PartialPivLU<Block>& lu_k = keep ? out.lu.back() : lu;
        if (k + 1 < chain) {
            const auto& b = P.sub[k]; // diagonal of P[k+1][k]
            // S_{k+1} = A_{k+1} - sigma - B S^{-1} B^H with B = Diag(b).
            Block Sinv = lu_k.solve(I);
            Block Snext = P.diag[k + 1] - sigma * I;
            Snext.noalias() -=
                b.asDiagonal() * Sinv * b.conjugate().asDiagonal();
            if (border) {
                Block Wnext = Block::Zero(bs, bs);
                if (k + 1 == chain - 1)
                    Wnext = Block(P.sub[chain - 1].asDiagonal()).adjoint();
                Wnext.noalias() -= b.asDiagonal() * lu_k.solve(W);
                W = std::move(Wnext);
            }
            S = std::move(Snext);
        }
    }
    if (border) {
        out.negatives += negatives_of(Z);
        if (keep) out.schur_lu = Eigen::PartialPivLU<Block>(Z);
    }
    return out;
}

} // namespace

int count_below(const BlockTridiag& P, double sigma) {
    return eliminate(P, sigma, false).negatives;
}

struct Factorization::Impl {
    const BlockTridiag* P;
    ChainResult chain;
};

Factorization::Factorization(const BlockTridiag& P, double sigma)
    : sigma_(sigma) {
    impl_ = std::make_shared<Impl>();
    impl_->P = &P;
    impl_->chain = eliminate(P, sigma, true);
    negatives_ = impl_->chain.negatives;
}

Vector Factorization::solve(Vector b) const {
    const auto& P = *impl_->P;
    const auto& ch = impl_->chain;
    const int R = P.rows();
    const int bs = P.block_size();
    const int chain = ch.has_border ? R - 1 : R;
    auto seg = [&](int k) { return b.segment(static_cast<long>(k) * bs, bs); };

    // Forward + diagonal: v_k = S_k^{-1} u_k on the eliminated rhs.
    for (int k = 0; k < chain; ++k) {
        Vector vk = ch.lu[k].solve(Vector(seg(k)));
        seg(k) = vk;
        if (k + 1 < chain)
            seg(k + 1) -= P.sub[k].cwiseProduct(vk);
        if (ch.has_border) seg(R - 1) -= ch.W[k].adjoint() * vk;
    }
    if (ch.has_border) seg(R - 1) = ch.schur_lu.solve(Vector(seg(R - 1)));
    // Backward: L^H x = v.
    for (int k = chain - 1; k >= 0; --k) {
        Vector rhs = Vector::Zero(bs);
        bool any = false;
        if (k + 1 < chain) {
            rhs += P.sub[k].conjugate().cwiseProduct(Vector(seg(k + 1)));
            any = true;
        }
        if (ch.has_border) {
            rhs.noalias() += ch.W[k] * Vector(seg(R - 1));
            any = true;
        }
        if (any) seg(k) -= ch.lu[k].solve(rhs);
    }
    return b;
}

std::vector<double> eigenvalues_below(const BlockTridiag& P, double threshold,
                                      double sigma,
                                      const LanczosOptions& opts) {
    const int wanted = count_below(P, threshold);
    if (wanted == 0) return {};

    Factorization fac(P, sigma);
    const long n = P.dim();
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (long i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();

    std::vector<Vector> basis;
    std::vector<double> alpha, beta;
    basis.push_back(v);

    std::vector<double> found;
    for (int it = 0; it < opts.max_iter; ++it) {
        Vector w = fac.solve(basis.back());
        const double a = (basis.back().adjoint() * w).real()(0, 0);
        alpha.push_back(a);
        w -= a * basis.back();
        if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q * (q.adjoint() * w)(0, 0);
        const double bnorm = w.norm();

        const int k = static_cast<int>(alpha.size());
        if (it % 4 == 3 || bnorm < 1e-14 || it == opts.max_iter - 1) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            found.clear();
            for (int i = 0; i < k; ++i) {
                const double theta = es.eigenvalues()(i); // 1/(e - sigma)
                if (theta == 0.0) continue;
                const double e = sigma + 1.0 / theta;
                if (e >= threshold) continue;
                const double resid = bnorm * std::abs(es.eigenvectors()(k - 1, i));
                if (resid <= opts.tol * std::max(1.0, std::abs(theta)))
                    found.push_back(e);
            }
            if (static_cast<int>(found.size()) == wanted) {
                std::sort(found.begin(), found.end());
                return found;
            }
        }
        if (bnorm < 1e-14) {
            // Invariant subspace exhausted; restart orthogonally to it.
            Vector r(n);
            for (long i = 0; i < n; ++i) r(i) = Complex(gauss(rng), gauss(rng));
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) r -= q * (q.adjoint() * r)(0, 0);
            const double rn = r.norm();
            if (rn < 1e-12) break;
            beta.push_back(0.0);
            basis.push_back(r / rn);
            continue;
        }
        beta.push_back(bnorm);
        basis.push_back(w / bnorm);
    }
    throw Error("eigenvalues_below: Lanczos failed to certify " +
                std::to_string(wanted) + " eigenvalues (found " +
                std::to_string(found.size()) + ")");
}

std::vector<double> lanczos_ritz_below(const BlockTridiag& P, double threshold,
                                       double sigma,
                                       const LanczosOptions& opts) {
    Factorization fac(P, sigma);
    const long n = P.dim();
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (long i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();

    std::vector<Vector> basis{v};
    std::vector<double> alpha, beta;
    for (int it = 0; it < opts.max_iter; ++it) {
        Vector w = fac.solve(basis.back());
        const double a = (basis.back().adjoint() * w).real()(0, 0);
        alpha.push_back(a);
        w -= a * basis.back();
        if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q * (q.adjoint() * w)(0, 0);
        double bnorm = w.norm();
        if (bnorm < 1e-14) {
            Vector r(n);
            for (long i = 0; i < n; ++i) r(i) = Complex(gauss(rng), gauss(rng));
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) r -= q * (q.adjoint() * r)(0, 0);
            const double rn = r.norm();
            if (rn < 1e-12) break;
            beta.push_back(0.0);
            basis.push_back(r / rn);
            continue;
        }
        beta.push_back(bnorm);
        basis.push_back(w / bnorm);
    }
    const int k = static_cast<int>(alpha.size());
    std::vector<double> found;
    if (k == 0) return found;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double bend = beta.empty() ? 0.0 : beta.back();
    for (int i = 0; i < k; ++i) {
        const double theta = es.eigenvalues()(i);
        if (theta == 0.0) continue;
        const double e = sigma + 1.0 / theta;
        if (e >= threshold) continue;
        const double resid = bend * std::abs(es.eigenvectors()(k - 1, i));
        if (resid <= 1e-8 * std::max(1.0, std::abs(theta)))
            found.push_back(e);
    }
    std::sort(found.begin(), found.end());
    return found;
}

namespace {

// Recursively locate all count jumps of the staircase in (a, b).
void locate_jumps(const BlockTridiag& P, double a, double b, int ca, int cb,
                  double tol, std::vector<std::pair<double, int>>& out) {
    if (cb == ca) return;
    if (b - a <= tol) {
        out.push_back({0.5 * (a + b), cb - ca});
        return;
    }
    const double m = 0.5 * (a + b);
    const int cm = count_below(P, m);
    locate_jumps(P, a, m, ca, cm, tol, out);
    locate_jumps(P, m, b, cm, cb, tol, out);
}

} // namespace

std::vector<double> clustered_eigenvalues_below(const BlockTridiag& P,
                                                double threshold, double sigma,
                                                const LanczosOptions& opts,
                                                double cluster_tol) {
    const int wanted = count_below(P, threshold);
    if (wanted == 0) return {};
    auto ritz = lanczos_ritz_below(P, threshold, sigma, opts);
    // With full reorthogonalization every certified Ritz value is a true
    // eigenvalue, so a matching total settles the multiset.
    if (static_cast<int>(ritz.size()) == wanted) return ritz;
    // Distinct representatives.
    std::vector<double> distinct;
    for (double v : ritz)
        if (distinct.empty() || v - distinct.back() > cluster_tol)
            distinct.push_back(v);

    std::vector<double> out;
    double lo = distinct.empty() ? sigma : distinct.front() - 1.0;
    // Make sure lo sits below everything.
    int clo = count_below(P, lo);
    int guard = 0;
    while (clo > 0 && ++guard < 60) {
        lo -= 2.0 * (std::abs(lo) + 1.0);
        clo = count_below(P, lo);
    }
    // Walk the distinct values, attributing multiplicity by counts, then
    // sweep any remaining jumps hiding between them.
    double a = lo;
    int ca = clo;
    for (double v : distinct) {
        const double vlo = v - std::max(cluster_tol, 1e-12 * std::abs(v));
        const double vhi = v + std::max(cluster_tol, 1e-12 * std::abs(v));
        const int c1 = count_below(P, vlo);
        const int c2 = count_below(P, vhi);
        if (c1 > ca) {
            // missed cluster(s) in (a, vlo)
            std::vector<std::pair<double, int>> jumps;
            locate_jumps(P, a, vlo, ca, c1, 1e-4 * std::max(1.0, std::abs(v)),
                         jumps);
            for (auto [val, mult] : jumps)
                for (int q = 0; q < mult; ++q) out.push_back(val);
        }
        for (int q = 0; q < c2 - c1; ++q) out.push_back(v);
        a = vhi;
        ca = c2;
    }
    if (ca < wanted) {
        std::vector<std::pair<double, int>> jumps;
        locate_jumps(P, a, threshold, ca, wanted,
                     1e-4 * std::max(1.0, std::abs(threshold)), jumps);
        for (auto [val, mult] : jumps)
            for (int q = 0; q < mult; ++q) out.push_back(val);
    }
    std::sort(out.begin(), out.end());
    if (static_cast<int>(out.size()) != wanted)
        throw Error("clustered_eigenvalues_below: multiplicity bookkeeping "
                    "failed");
    return out;
}

double lowest_eigenvalue(const BlockTridiag& P, double sigma_guess,
                         double tol) {
    // Shift-invert inverse iteration with Rayleigh pull-in: refactor close
    // to the current estimate so the power ratios stay strong. Every
    // factorization certifies (via its inertia) that the shift is still
    // below the bottom eigenvalue.
    double sigma = sigma_guess;
    std::unique_ptr<Factorization> fac;
    for (int tries = 0; tries < 60; ++tries) {
        fac = std::make_unique<Factorization>(P, sigma);
        if (fac->negatives() == 0) break;
        sigma -= 2.0 * (std::abs(sigma) + 1.0);
    }
    if (fac->negatives() != 0)
        throw Error("lowest_eigenvalue: no shift below the spectrum found");

    const long n = P.dim();
    std::mt19937 rng(77u);
    std::normal_distribution<double> gauss;
    Vector v(n);
    for (long i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v.normalize();

    double e = sigma;
    for (int outer = 0; outer < 12; ++outer) {
        for (int inner = 0; inner < 10; ++inner) {
            Vector w = fac->solve(v);
            v = w / w.norm();
        }
        Vector Pv = P.apply(v);
        e = (v.adjoint() * Pv).real()(0, 0);
        const double resid = (Pv - e * v).norm();
        if (resid <= tol * std::max(1.0, std::abs(e))) return e;
        // Pull the shift just below the Rayleigh quotient (an upper bound
        // on the bottom eigenvalue once the iterate is dominated by it).
        double next = e - std::max(2.0 * resid, 1e-10 * (1.0 + std::abs(e)));
        for (int tries = 0; tries < 30; ++tries) {
            auto trial = std::make_unique<Factorization>(P, next);
            if (trial->negatives() == 0) {
                fac = std::move(trial);
                sigma = next;
                break;
            }
            next = 0.5 * (sigma + next);
        }
    }
    return e;
}

} // namespace robinband::sparse
