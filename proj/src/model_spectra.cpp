#include "robinband/model_spectra.hpp"

#include <algorithm>
#include <cmath>

#include "robinband/errors.hpp"
#include "robinband/util.hpp"

namespace robinband::model {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
using sparse::Block;
using sparse::BlockTridiag;
using sparse::Complex;
using sparse::DiagBlock;
} // namespace

double HalfPlaneModel::gamma_hb() const {
    const double v = std::pow(h, alpha - 0.5) / std::sqrt(b) * gamma;
    if (!std::isfinite(v)) throw Error("HalfPlaneModel: gamma_hb not finite");
    return v;
}

double CylinderModel::s_tau() const { return S * std::sqrt(b / h); }
double CylinderModel::tau_max() const { return T * std::sqrt(b); }
double CylinderModel::gamma_eff() const {
    return HalfPlaneModel{h, b, gamma, alpha}.gamma_hb();
}

int TorusModel::flux_quanta() const {
    const double q = R * R / (2.0 * kPi);
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-9 || r < 1.0)
        throw PhaseMismatch("R^2 must be a positive integer multiple of 2 pi");
    return static_cast<int>(r);
}

std::vector<FiberPoint>
fiber_spectrum(const HalfPlaneModel& m, const std::vector<double>& xi_grid,
               int p_max, const band1d::HalfLineDiscretization& disc) {
    const double g = m.gamma_hb();
    std::vector<FiberPoint> out;
    out.reserve(xi_grid.size() * p_max);
    for (double xi : xi_grid) {
        auto d = disc;
        d.L = std::max(d.L, std::abs(xi) + 12.0);
        d.n = std::max(d.n, static_cast<int>(std::ceil(d.L / disc.spacing())));
        for (int j = 1; j <= p_max; ++j)
            out.push_back({j, xi, m.h * m.b * band1d::mu(j, {g, xi}, d)});
    }
    return out;
}

tridiag::SymTridiag strip_fiber_tridiag(double tau_max, int nt,
                                        double gamma_eff, double xi) {
    const double dt = tau_max / nt;
    tridiag::SymTridiag m;
    m.diag.resize(nt);
    m.off.assign(nt - 1, -1.0 / (dt * dt));
    for (int r = 0; r < nt; ++r) {
        const double tau = r * dt;
        m.diag[r] = 2.0 / (dt * dt) + (tau - xi) * (tau - xi);
    }
    m.diag[0] += 2.0 * gamma_eff / dt;
    m.off[0] = -std::sqrt(2.0) / (dt * dt);
    return m;
}

std::vector<double> strip_spectrum_fiber(double S_tau, double tau_max,
                                         double gamma_eff,
                                         double threshold_scaled, int nt) {
    std::vector<double> vals;
    const double dxi = 2.0 * kPi / S_tau;
    const double margin =
        std::sqrt(std::max(threshold_scaled, 0.0)) + std::abs(gamma_eff) + 4.0;
    const int n_cap = static_cast<int>((tau_max + margin) / dxi) + 2;
    for (int n = -n_cap; n <= n_cap; ++n) {
        const double xi = n * dxi;
        const auto t = strip_fiber_tridiag(tau_max, nt, gamma_eff, xi);
        for (double v : tridiag::eigenvalues_below(t, threshold_scaled))
            vals.push_back(v);
    }
    std::sort(vals.begin(), vals.end());
    return vals;
}

sparse::BlockTridiag strip_operator(double S_tau, double tau_max,
                                    double gamma_eff, int ns, int nt) {
    const double dsg = S_tau / ns;
    const double dt = tau_max / nt;

    // Integer-flux gauge offset centering the occupied discrete momenta;
    // the quantized-momentum set {2 pi n / S_tau} is unchanged.
    const double c0 = 2.0 * kPi / S_tau *
                      std::round(0.5 * tau_max * S_tau / (2.0 * kPi));

    // 4th-order periodic stencils: P2 ~ -d^2/ds^2, Q ~ -i d/ds.
    Block P2 = Block::Zero(ns, ns);
    Block Q = Block::Zero(ns, ns);
    for (int i = 0; i < ns; ++i) {
        auto wrap = [&](int k) { return ((k % ns) + ns) % ns; };
        P2(i, i) = 30.0 / 12.0 / (dsg * dsg);
        P2(i, wrap(i + 1)) += -16.0 / 12.0 / (dsg * dsg);
        P2(i, wrap(i - 1)) += -16.0 / 12.0 / (dsg * dsg);
        P2(i, wrap(i + 2)) += 1.0 / 12.0 / (dsg * dsg);
        P2(i, wrap(i - 2)) += 1.0 / 12.0 / (dsg * dsg);
        const Complex im(0.0, 1.0);
        Q(i, wrap(i + 1)) += -im * (8.0 / 12.0 / dsg);
        Q(i, wrap(i - 1)) += im * (8.0 / 12.0 / dsg);
        Q(i, wrap(i + 2)) += im * (1.0 / 12.0 / dsg);
        Q(i, wrap(i - 2)) += -im * (1.0 / 12.0 / dsg);
    }

    BlockTridiag P;
    P.diag.resize(nt);
    P.sub.resize(nt - 1);
    for (int r = 0; r < nt; ++r) {
        const double tau = r * dt;
        const double a = c0 - tau;
        Block blk = P2 + (2.0 * a) * Q;
        blk.diagonal().array() += a * a + 2.0 / (dt * dt);
        if (r == 0) blk.diagonal().array() += 2.0 * gamma_eff / dt;
        P.diag[r] = std::move(blk);
        if (r + 1 < nt) {
            const double e = r == 0 ? -std::sqrt(2.0) / (dt * dt)
                                    : -1.0 / (dt * dt);
            P.sub[r] = DiagBlock::Constant(ns, Complex(e, 0.0));
        }
    }
    return P;
}

std::vector<double> strip_spectrum_direct(double S_tau, double tau_max,
                                          double gamma_eff,
                                          double threshold_scaled, int ns,
                                          int nt) {
    const auto P = strip_operator(S_tau, tau_max, gamma_eff, ns, nt);
    // Shift below the band bottom: the Robin term can pull the spectrum
    // down to about -gamma_eff^2.
    const double bottom_guess =
        gamma_eff < 0.0 ? -1.5 * gamma_eff * gamma_eff - 1.0 : -0.5;
    const double sigma = 0.5 * (bottom_guess + threshold_scaled);
    return sparse::eigenvalues_below(P, threshold_scaled, sigma);
}

namespace {

struct AutoGrid {
    int ns;
    int nt;
};

AutoGrid strip_auto_grid(double S_tau, double tau_max, int ns, int nt) {
    if (nt == 0) nt = std::max(64, static_cast<int>(std::ceil(tau_max / 0.0625)));
    if (ns == 0) ns = std::max(96, static_cast<int>(std::ceil(S_tau / 0.035)));
    return {ns, nt};
}

} // namespace

StripComparison cylinder_spectrum_checked(const CylinderModel& c, int count,
                                          double rel_tol, int ns, int nt) {
    const double hb = c.h * c.b;
    const double S_tau = c.s_tau();
    const double tau_max = c.tau_max();
    const double g = c.gamma_eff();
    auto grid = strip_auto_grid(S_tau, tau_max, ns, nt);

    for (int attempt = 0;; ++attempt) {
        // Fiber pass fixes the threshold for the direct solve.
        double probe = 3.0 + g * g;
        std::vector<double> fib;
        for (int tries = 0; tries < 12; ++tries) {
            fib = strip_spectrum_fiber(S_tau, tau_max, g, probe, grid.nt);
            if (static_cast<int>(fib.size()) > count) break;
            probe += 2.0;
        }
        if (static_cast<int>(fib.size()) <= count)
            throw Error("cylinder_spectrum: fiber probe found too few values");
        const double thr = 0.5 * (fib[count - 1] + fib[count]);
        fib.resize(count);

        auto dir = strip_spectrum_direct(S_tau, tau_max, g, thr, grid.ns, grid.nt);
        if (static_cast<int>(dir.size()) < count)
            dir = strip_spectrum_direct(S_tau, tau_max, g, thr + 0.2, grid.ns,
                                        grid.nt);
        if (static_cast<int>(dir.size()) < count)
            throw GridTooCoarse("direct strip spectrum missed eigenvalues");
        dir.resize(count);

        double mis = 0.0;
        for (int i = 0; i < count; ++i) {
            const double den =
                std::max({std::abs(fib[i]), std::abs(dir[i]), 0.01});
            mis = std::max(mis, std::abs(fib[i] - dir[i]) / den);
        }
        if (mis <= rel_tol) {
            StripComparison out;
            out.max_rel_mismatch = mis;
            out.direct.resize(count);
            out.fiber.resize(count);
            for (int i = 0; i < count; ++i) {
                out.direct[i] = hb * dir[i];
                out.fiber[i] = hb * fib[i];
            }
            return out;
        }
        if (attempt >= 1)
            throw GridTooCoarse("strip fiber/direct mismatch " +
                                std::to_string(mis));
        grid.ns = grid.ns * 3 / 2;
        grid.nt = grid.nt * 3 / 2;
    }
}

std::vector<double> cylinder_spectrum(const CylinderModel& c, int count,
                                      int ns, int nt) {
    return cylinder_spectrum_checked(c, count, 1e-3, ns, nt).direct;
}

double positive_part_energy(const std::vector<double>& evs,
                            double computed_threshold, double level) {
    if (computed_threshold < level)
        throw ThresholdTooLow("spectrum computed only below " +
                              std::to_string(computed_threshold));
    double sum = 0.0;
    for (double e : evs)
        if (e < level) sum += level - e;
    return sum;
}

double cylinder_energy(const CylinderModel& c, double lambda) {
    const double hb = c.h * c.b;
    const double level = hb * (1.0 + lambda);
    const double thr_scaled = (1.0 + lambda) * 1.15 + 0.1;
    auto grid = strip_auto_grid(c.s_tau(), c.tau_max(), 0, 0);
    auto fib = strip_spectrum_fiber(c.s_tau(), c.tau_max(), c.gamma_eff(),
                                    thr_scaled, grid.nt);
    for (auto& v : fib) v *= hb;
    return positive_part_energy(fib, hb * thr_scaled, level);
}

sparse::BlockTridiag torus_operator(const TorusModel& t, double spacing) {
    const int n_flux = t.flux_quanta();
    (void)n_flux;
    const int N = std::max(8, static_cast<int>(std::ceil(t.R / spacing)));
    const double d = t.R / N;
    const double inv = 1.0 / (d * d);
    const Complex im(0.0, 1.0);

    BlockTridiag P;
    P.diag.resize(N);
    P.sub.resize(N - 1);
    for (int k = 0; k < N; ++k) {
        const double x2 = k * d;
        Block blk = Block::Zero(N, N);
        blk.diagonal().array() += 4.0 * inv;
        // horizontal links with Landau-gauge Peierls phase, periodic in x1
        const Complex hop = -inv * std::exp(im * (-x2 * d));
        for (int j = 0; j < N; ++j) {
            const int jp = (j + 1) % N;
            blk(jp, j) += hop;
            blk(j, jp) += std::conj(hop);
        }
        P.diag[k] = std::move(blk);
        if (k + 1 < N)
            P.sub[k] = DiagBlock::Constant(N, Complex(-inv, 0.0));
    }
    // Quasi-periodic vertical wrap: u(x1, R) = exp(-i R x1) u(x1, 0).
    P.wrap = DiagBlock(N);
    for (int j = 0; j < N; ++j)
        P.wrap(j) = -inv * std::exp(im * (t.R * (j * d)));
    return P;
}

int torus_count_below(const TorusModel& t, double level, double spacing) {
    const auto P = torus_operator(t, spacing);
    return sparse::count_below(P, level);
}

std::vector<Cluster> torus_landau_spectrum(const TorusModel& t, int count,
                                           double spacing, double value_tol) {
    const auto P = torus_operator(t, spacing);
    std::vector<Cluster> clusters;
    int found = 0;
    double lo = 0.0; // magnetic Laplacian is nonnegative
    while (found < count && clusters.size() < 8) {
        // march up until the count increases
        double hi = lo + 0.5;
        int c_lo = sparse::count_below(P, lo);
        int c_hi = sparse::count_below(P, hi);
        int guard = 0;
        while (c_hi == c_lo && ++guard < 30) {
            lo = hi;
            c_lo = c_hi;
            hi += 0.5;
            c_hi = sparse::count_below(P, hi);
        }
        if (c_hi == c_lo) break;
        // bisect the lower edge of the next cluster
        double a = lo, b = hi;
        while (b - a > value_tol) {
            const double m = 0.5 * (a + b);
            if (sparse::count_below(P, m) > c_lo)
                b = m;
            else
                a = m;
        }
        // cluster width: march b upward in value_tol steps while the
        // count keeps increasing within a tight window
        const double edge = 0.5 * (a + b);
        double top = edge + value_tol;
        int c_top = sparse::count_below(P, top);
        while (sparse::count_below(P, top + value_tol) > c_top) {
            top += value_tol;
            c_top = sparse::count_below(P, top + value_tol);
        }
        c_top = sparse::count_below(P, top);
        clusters.push_back({edge, c_top - c_lo});
        found = c_top;
        lo = top;
    }
    return clusters;
}

double nu_b(double Lambda) {
    if (Lambda < 1.0) return 0.0;
    return std::floor((Lambda + 1.0) / 2.0) / (2.0 * kPi);
}

sparse::BlockTridiag dirichlet_square_operator(double R, double spacing) {
    const int cells = std::max(8, static_cast<int>(std::ceil(R / spacing)));
    const int N = cells - 1; // interior nodes per direction
    const double d = R / cells;
    const double inv = 1.0 / (d * d);
    const Complex im(0.0, 1.0);

    BlockTridiag P;
    P.diag.resize(N);
    P.sub.resize(N - 1);
    for (int k = 0; k < N; ++k) {
        const double x2 = (k + 1) * d;
        Block blk = Block::Zero(N, N);
        blk.diagonal().array() += 4.0 * inv;
        const Complex hop = -inv * std::exp(im * (-x2 * d));
        for (int j = 0; j + 1 < N; ++j) {
            blk(j + 1, j) += hop;
            blk(j, j + 1) += std::conj(hop);
        }
        P.diag[k] = std::move(blk);
        if (k + 1 < N)
            P.sub[k] = DiagBlock::Constant(N, Complex(-inv, 0.0));
    }
    return P;
}

int dirichlet_square_count(double Lambda, double R, double spacing) {
    if (R < 4.0) throw Error("dirichlet_square_count: R must be >= 4");
    if (spacing > 0.05) throw Error("dirichlet_square_count: spacing > 0.05");
    const auto P = dirichlet_square_operator(R, spacing);
    const int count = sparse::count_below(P, Lambda);
    const auto Pf = dirichlet_square_operator(R, spacing / 1.4);
    const int fine = sparse::count_below(Pf, Lambda);
    const int slack = std::max(1, count / 50);
    if (std::abs(fine - count) > slack)
        throw GridTooCoarse("Dirichlet square count unstable: " +
                            std::to_string(count) + " vs " +
                            std::to_string(fine));
    const double cap = R * R * nu_b(Lambda) + 1.0 + 1e-9;
    if (fine > cap)
        throw Error("dirichlet_square_count: count exceeds R^2 nu_b + 1");
    return fine;
}

double lt_classical_constant(double alpha, int d) {
    if (alpha < 0.5 || d < 0) throw Error("lt_classical_constant: bad args");
    return std::exp(std::lgamma(alpha + 1.0) - d * std::log(2.0) -
                    0.5 * d * std::log(kPi) - std::lgamma(1.0 + alpha + 0.5 * d));
}

LtCheck lt_bound_check_d0(double alpha, double gamma) {
    const double gp = std::max(gamma, 0.0);
    LtCheck out;
    out.lhs = gp > 0.0 ? std::pow(gp * gp, alpha) : 0.0;
    out.rhs = 2.0 * lt_classical_constant(alpha, 0) * std::pow(gp, 2.0 * alpha);
    out.holds = out.lhs <= out.rhs + 1e-12;
    return out;
}

namespace {

// Half-strip [-X, X] x [0, Y], Dirichlet at |x| = X and y = Y, boundary
// potential -gamma(x) on y = 0 entering through the form.
BlockTridiag lt_strip_operator(const std::function<double(double)>& gamma,
                               double X, double Y, double spacing) {
    const int nx = std::max(16, static_cast<int>(std::ceil(2.0 * X / spacing)) - 1);
    const int ny = std::max(16, static_cast<int>(std::ceil(Y / spacing)));
    const double dx = 2.0 * X / (nx + 1);
    const double dy = Y / ny;

    BlockTridiag P;
    P.diag.resize(ny);
    P.sub.resize(ny - 1);
    for (int r = 0; r < ny; ++r) {
        Block blk = Block::Zero(nx, nx);
        for (int i = 0; i < nx; ++i) {
            blk(i, i) = 2.0 / (dx * dx) + 2.0 / (dy * dy);
            if (i + 1 < nx) {
                blk(i + 1, i) = -1.0 / (dx * dx);
                blk(i, i + 1) = -1.0 / (dx * dx);
            }
        }
        if (r == 0)
            for (int i = 0; i < nx; ++i) {
                const double x = -X + (i + 1) * dx;
                blk(i, i) += -2.0 * gamma(x) / dy;
            }
        P.diag[r] = std::move(blk);
        if (r + 1 < ny) {
            const double e =
                r == 0 ? -std::sqrt(2.0) / (dy * dy) : -1.0 / (dy * dy);
            P.sub[r] = DiagBlock::Constant(nx, Complex(e, 0.0));
        }
    }
    return P;
}

double lt_strip_riesz(double alpha, const std::function<double(double)>& gamma,
                      double X, double Y, double spacing) {
    const auto P = lt_strip_operator(gamma, X, Y, spacing);
    double gmax = 0.0;
    for (int i = 0; i <= 200; ++i)
        gmax = std::max(gmax, gamma(-X + 2.0 * X * i / 200.0));
    const double sigma = -(gmax * gmax) - 1.0;
    const auto evs = sparse::eigenvalues_below(P, 0.0, sigma);
    double sum = 0.0;
    for (double e : evs) sum += std::pow(-e, alpha);
    return sum;
}

} // namespace

LtCheck lt_bound_check_d1(double alpha,
                          const std::function<double(double)>& gamma, double X,
                          double Y, double spacing) {
    const double lhs = lt_strip_riesz(alpha, gamma, X, Y, spacing);
    const double lhs_big = lt_strip_riesz(alpha, gamma, X * 4.0 / 3.0,
                                          Y * 4.0 / 3.0, spacing);
    if (lhs > 0.0 && std::abs(lhs_big - lhs) > 0.01 * std::max(lhs, 1e-12))
        throw TruncationTooSmall("Riesz mean moved by " +
                                 std::to_string(std::abs(lhs_big - lhs)));

    auto integrand = [&](double x) {
        const double g = std::max(gamma(x), 0.0);
        return std::pow(g, 2.0 * alpha + 1.0);
    };
    const double integral = util::integrate(integrand, -X, X, 1e-10);
    LtCheck out;
    out.lhs = lhs_big;
    out.rhs = 2.0 * lt_classical_constant(alpha, 1) * integral;
    out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
    return out;
}

} // namespace robinband::model
