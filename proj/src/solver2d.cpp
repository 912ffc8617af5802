#include "robinband/solver2d.hpp"

#include <algorithm>
#include <cmath>

#include "robinband/errors.hpp"

namespace robinband::solver2d {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
using sparse::Block;
using sparse::BlockTridiag;
using sparse::Complex;
using sparse::DiagBlock;
} // namespace

void ProblemSpec::validate() const {
    if (h <= 0.0 || b <= 0.0) throw Error("ProblemSpec: h and b must be positive");
    if (size <= 0.0) throw Error("ProblemSpec: domain size must be positive");
    if (alpha < 0.5) throw Error("ProblemSpec: alpha must be >= 1/2");
    if (domain == Domain::Square && std::abs(gamma) > 0.0)
        throw Error("ProblemSpec: the square solver is Neumann only");
    if (lambda > b + 1e-12) throw Error("ProblemSpec: lambda must satisfy lambda <= b");
}

double ProblemSpec::a_theta(double r) const {
    if (!B_radial) return 0.5 * b * r;
    if (r == 0.0) return 0.0;
    // midpoint rule on int_0^r B(rho) rho d rho
    const int n = 64;
    double sum = 0.0;
    const double dr = r / n;
    for (int i = 0; i < n; ++i) {
        const double rho = (i + 0.5) * dr;
        sum += B_radial(rho) * rho * dr;
    }
    return sum / r;
}

std::pair<double, int> energy_and_count(const std::vector<double>& evs,
                                        double threshold, double lambda,
                                        double h) {
    const double level = lambda * h;
    if (threshold <= level)
        throw IncompleteSpectrum("spectrum threshold at or below lambda h");
    double E = 0.0;
    int N = 0;
    for (double e : evs)
        if (e < level) {
            E += level - e;
            ++N;
        }
    return {E, N};
}

namespace {

struct RadialGrid {
    std::vector<double> r;    // nodes, last one at R
    std::vector<double> mass; // lumped r dr weights
    std::vector<double> face; // face radii between consecutive nodes
    double inner_gap = 0.0;   // distance from the first node to r=0
    bool has_center = false;  // node at r = 0 present
};

RadialGrid radial_grid_from_nodes(std::vector<double> nodes, double R,
                                  bool with_center) {
    RadialGrid g;
    g.r = std::move(nodes);
    g.has_center = with_center;
    const int nn = static_cast<int>(g.r.size());
    g.mass.resize(nn);
    g.face.resize(nn - 1);
    g.inner_gap = with_center ? 0.0 : g.r[0];
    for (int k = 0; k + 1 < nn; ++k) g.face[k] = 0.5 * (g.r[k] + g.r[k + 1]);
    for (int k = 0; k < nn; ++k) {
        const double lo =
            k == 0 ? (with_center ? 0.0 : 0.5 * g.r[0]) : 0.5 * (g.r[k - 1] + g.r[k]);
        const double hi = k + 1 == nn ? R : 0.5 * (g.r[k] + g.r[k + 1]);
        const double a = with_center && k == 0 ? 0.0 : lo;
        g.mass[k] = 0.5 * (hi * hi - a * a);
    }
    return g;
}

// FEM-lumped radial grid on [0, R]; the center node is kept only for
// m = 0 fibers (it carries the r=0 regularity).
RadialGrid radial_grid(double R, int n, bool with_center) {
    const double d = R / n;
    std::vector<double> nodes;
    for (int i = with_center ? 0 : 1; i <= n; ++i) nodes.push_back(i * d);
    return radial_grid_from_nodes(std::move(nodes), R, with_center);
}

// Boundary-graded grid: fine spacing R/n within depth W of r = R, and
// three times coarser inside (boundary-localized probes).
RadialGrid radial_grid_graded(double R, int n, double W) {
    const double fine = R / n;
    std::vector<double> nodes;
    const double split = R - W;
    const double coarse = 3.0 * fine;
    const int n_in = std::max(4, static_cast<int>(std::floor(split / coarse)));
    for (int i = 1; i <= n_in; ++i) nodes.push_back(split * i / n_in);
    double r = split;
    while (r + fine < R - 0.5 * fine) {
        r += fine;
        nodes.push_back(r);
    }
    nodes.push_back(R);
    return radial_grid_from_nodes(std::move(nodes), R, false);
}

tridiag::SymTridiag radial_fiber(const ProblemSpec& spec, int m, int n) {
    const double R = spec.size;
    const double d = R / n;
    const auto g = radial_grid(R, n, m == 0);
    const int nn = static_cast<int>(g.r.size());
    const double hh = spec.h * spec.h;

    std::vector<double> K(nn, 0.0), off(nn - 1, 0.0);
    for (int k = 0; k + 1 < nn; ++k) {
        const double s = hh * g.face[k] / (g.r[k + 1] - g.r[k]);
        K[k] += s;
        K[k + 1] += s;
        off[k] = -s;
    }
    if (m != 0) K[0] += hh * (g.r[0] - 0.5 * d) / d; // Dirichlet link to r=0 side
    for (int k = 0; k < nn; ++k) {
        double V;
        if (m == 0 && g.r[k] == 0.0)
            V = 0.0;
        else {
            const double q = spec.h * m / g.r[k] - spec.a_theta(g.r[k]);
            V = q * q;
        }
        K[k] += V * g.mass[k];
    }
    K[nn - 1] += std::pow(spec.h, 1.0 + spec.alpha) * spec.gamma * R;

    tridiag::SymTridiag t;
    t.diag.resize(nn);
    t.off.resize(nn - 1);
    for (int k = 0; k < nn; ++k) t.diag[k] = K[k] / g.mass[k];
    for (int k = 0; k + 1 < nn; ++k)
        t.off[k] = off[k] / std::sqrt(g.mass[k] * g.mass[k + 1]);
    return t;
}

int auto_radial_n(const ProblemSpec& spec) {
    if (spec.radial_n > 0) return spec.radial_n;
    const double ell = std::sqrt(spec.h / spec.b);
    return std::max(64, static_cast<int>(std::ceil(12.0 * spec.size / ell)));
}

std::vector<double> fiber_values(const ProblemSpec& spec, int m, int n,
                                 double threshold, bool richardson) {
    const auto tc = radial_fiber(spec, m, n);
    auto vals = tridiag::eigenvalues_below(tc, threshold, 1e-13);
    if (!richardson) return vals;
    const auto tf = radial_fiber(spec, m, 2 * n);
    auto fine = tridiag::eigenvalues_below(tf, threshold, 1e-13);
    // pair by index; within one fiber the eigenvalues are simple
    const size_t k = std::min(vals.size(), fine.size());
    std::vector<double> out(fine.begin(), fine.end());
    for (size_t i = 0; i < k; ++i) out[i] = (4.0 * fine[i] - vals[i]) / 3.0;
    return out;
}

} // namespace

tridiag::SymTridiag disk_fiber_matrix(const ProblemSpec& spec, int m, int n) {
    return radial_fiber(spec, m, n > 0 ? n : auto_radial_n(spec));
}

SpectrumResult disk_fiber_solve(const ProblemSpec& spec) {
    spec.validate();
    if (spec.domain != Domain::Disk) throw Error("disk_fiber_solve: not a disk");
    if (!spec.gamma_theta.empty())
        throw Error("disk_fiber_solve: variable gamma needs the full 2D solver");
    const double R = spec.size;
    const double level = spec.lambda * spec.h;
    const double threshold = 1.2 * level;
    const int n = auto_radial_n(spec);

    const double hb = spec.h * spec.b;
    const double K = 9.0;
    const double aR = spec.a_theta(R);
    int m_lo = spec.m_lo, m_hi = spec.m_hi;
    if (m_lo == 0 && m_hi == 0) {
        m_lo = static_cast<int>(std::floor(R * (aR - K * std::sqrt(hb)) / spec.h)) - 2;
        m_hi = static_cast<int>(std::ceil(R * (aR + K * std::sqrt(hb)) / spec.h)) + 2;
    }

    auto sweep = [&](int lo, int hi) {
        std::vector<double> evs;
        for (int m = lo; m <= hi; ++m)
            for (double v :
                 fiber_values(spec, m, n, threshold, spec.radial_richardson))
                evs.push_back(v);
        return evs;
    };
    std::vector<double> evs = sweep(m_lo, m_hi);
    // window audit: extending by 10 must add nothing below the threshold
    for (int ext = 0;; ++ext) {
        if (ext >= 6) throw MRangeTooSmall("angular momentum window kept growing");
        const auto extra_lo = sweep(m_lo - 10, m_lo - 1);
        const auto extra_hi = sweep(m_hi + 1, m_hi + 10);
        if (extra_lo.empty() && extra_hi.empty()) break;
        evs.insert(evs.end(), extra_lo.begin(), extra_lo.end());
        evs.insert(evs.end(), extra_hi.begin(), extra_hi.end());
        m_lo -= 10;
        m_hi += 10;
    }
    std::sort(evs.begin(), evs.end());

    // Grid audit: the two-grid defect on the lowest values must stay small.
    if (spec.radial_richardson && !evs.empty()) {
        std::vector<double> plain;
        for (int m = m_lo; m <= m_hi; ++m)
            for (double v : fiber_values(spec, m, 2 * n, threshold, false))
                plain.push_back(v);
        std::sort(plain.begin(), plain.end());
        const size_t k = std::min({evs.size(), plain.size(), size_t(10)});
        for (size_t i = 0; i < k; ++i) {
            const double ref = std::max(std::abs(evs[i]), 0.1 * hb);
            if (std::abs(plain[i] - evs[i]) > 0.005 * ref)
                throw GridTooCoarse("disk fiber refinement defect at index " +
                                    std::to_string(i));
        }
    }

    SpectrumResult res;
    res.eigenvalues = std::move(evs);
    res.threshold = threshold;
    res.h = spec.h;
    res.lambda = spec.lambda;
    auto [E, N] = energy_and_count(res.eigenvalues, threshold, spec.lambda, spec.h);
    res.E = E;
    res.N = N;
    return res;
}

sparse::BlockTridiag polar_disk_operator(const ProblemSpec& spec, int nr,
                                         int ntheta, bool graded) {
    const double R = spec.size;
    const double dtheta = 2.0 * kPi / ntheta;
    const auto g = graded ? radial_grid_graded(R, nr, 0.35 * R)
                          : radial_grid(R, nr, false);
    const int nn = static_cast<int>(g.r.size());
    const double hh = spec.h * spec.h;

    if (static_cast<long>(nn) * ntheta > spec.max_unknowns)
        throw BudgetExceeded("polar grid exceeds the unknown budget");

    // Azimuthal gauge offset (integer winding) centering the occupied
    // angular momenta; integer offsets leave the quantized set unchanged.
    const int m0 = static_cast<int>(std::round(R * spec.a_theta(R) / spec.h));

    std::vector<double> gamma_t(ntheta, spec.gamma);
    if (!spec.gamma_theta.empty()) {
        if (static_cast<int>(spec.gamma_theta.size()) != ntheta)
            throw Error("polar_disk_operator: gamma sample count mismatch");
        gamma_t = spec.gamma_theta;
    }

    // Form pieces before mass scaling (theta measure dtheta everywhere):
    //   radial link k..k+1:       s_k   = h^2 face_k dtheta / dr
    //   theta link at radius k:   c_k   = h^2 (mass_k / r_k^2) / dtheta
    //   node mass:                w_k   = mass_k dtheta
    //   Robin at r=R:             h^(1+alpha) gamma R dtheta
    std::vector<double> w(nn), s(nn - 1), c(nn), phase(nn);
    for (int k = 0; k < nn; ++k) {
        w[k] = g.mass[k] * dtheta;
        c[k] = hh * (g.mass[k] / (g.r[k] * g.r[k])) / dtheta;
        phase[k] =
            (spec.a_theta(g.r[k]) * g.r[k] - m0 * spec.h) * dtheta / spec.h;
    }
    for (int k = 0; k + 1 < nn; ++k)
        s[k] = hh * g.face[k] * dtheta / (g.r[k + 1] - g.r[k]);
    const double robin = std::pow(spec.h, 1.0 + spec.alpha) * R * dtheta;

    // No stiffness through the axis: the innermost face is left natural,
    // which keeps the m = 0 regularity; higher angular components are
    // pushed away from the axis by the azimuthal kinetic term.
    Block base = Block::Zero(nn, nn);
    for (int k = 0; k + 1 < nn; ++k) {
        base(k, k) += s[k];
        base(k + 1, k + 1) += s[k];
        base(k, k + 1) -= s[k];
        base(k + 1, k) -= s[k];
    }
    for (int k = 0; k < nn; ++k) base(k, k) += 2.0 * c[k];

    const Complex im(0.0, 1.0);
    BlockTridiag P;
    P.diag.resize(ntheta);
    P.sub.resize(ntheta - 1);
    DiagBlock hop(nn);
    for (int k = 0; k < nn; ++k)
        hop(k) = -c[k] * std::exp(-im * phase[k]) / w[k];

    for (int t = 0; t < ntheta; ++t) {
        Block blk = base;
        blk(nn - 1, nn - 1) += robin * gamma_t[t];
        for (int k = 0; k < nn; ++k)
            for (int l = 0; l < nn; ++l) blk(k, l) /= std::sqrt(w[k] * w[l]);
        P.diag[t] = std::move(blk);
        if (t + 1 < ntheta) P.sub[t] = hop;
    }
    P.wrap = hop;
    return P;
}

SpectrumResult polar_disk_solve(const ProblemSpec& spec, int nr, int ntheta) {
    spec.validate();
    const double level = spec.lambda * spec.h;
    const double threshold = 1.2 * level;
    const auto P = polar_disk_operator(spec, nr, ntheta);
    const double bottom_guess =
        std::min(0.0, -2.0 * std::pow(spec.h, 2.0 * spec.alpha) * spec.gamma *
                          spec.gamma) -
        0.1 * level;
    const double sigma = 0.5 * (bottom_guess + threshold);
    SpectrumResult res;
    res.eigenvalues = sparse::clustered_eigenvalues_below(P, threshold, sigma);
    res.threshold = threshold;
    res.h = spec.h;
    res.lambda = spec.lambda;
    auto [E, N] = energy_and_count(res.eigenvalues, threshold, spec.lambda, spec.h);
    res.E = E;
    res.N = N;
    return res;
}

namespace {

int auto_square_n(const ProblemSpec& spec) {
    const double ell = std::sqrt(spec.h / spec.b);
    const int n = std::max(32, static_cast<int>(std::ceil(8.0 * spec.size / ell)));
    if (static_cast<long>(n + 1) * (n + 1) > spec.max_unknowns)
        throw BudgetExceeded("square grid exceeds the unknown budget; h too small");
    return n;
}

} // namespace

sparse::BlockTridiag square_operator(const ProblemSpec& spec, int n,
                                     double gauge_shift) {
    const double L = spec.size;
    const double d = L / n;
    const int nn = n + 1; // Neumann keeps boundary nodes
    const double hh = spec.h * spec.h;
    const Complex im(0.0, 1.0);

    // Lumped form on the node lattice: link weight = transverse width
    // factor (1/2 along the boundary), node mass = d^2 cx cy.
    auto cw = [&](int i) { return (i == 0 || i == n) ? 0.5 : 1.0; };

    BlockTridiag P;
    P.diag.resize(nn);
    P.sub.resize(nn - 1);
    for (int k = 0; k < nn; ++k) {
        const double x2 = k * d;
        const double cy = cw(k);
        Block blk = Block::Zero(nn, nn);
        // horizontal links at row k: Landau gauge A1 = -b x2 (+ shift)
        const double phi = (-spec.b * x2 + gauge_shift) * d / spec.h;
        const Complex hop = -hh * cy * std::exp(-im * phi);
        for (int i = 0; i + 1 < nn; ++i) {
            blk(i + 1, i) += hop;
            blk(i, i + 1) += std::conj(hop);
            blk(i, i) += hh * cy;
            blk(i + 1, i + 1) += hh * cy;
        }
        // vertical links contribute their endpoint diagonals here; the
        // couplings themselves sit in the sub blocks
        for (int i = 0; i < nn; ++i) {
            if (k > 0) blk(i, i) += hh * cw(i);
            if (k < n) blk(i, i) += hh * cw(i);
        }
        for (int i = 0; i < nn; ++i)
            for (int j = 0; j < nn; ++j)
                blk(i, j) /= d * d * std::sqrt(cw(i) * cy * cw(j) * cy);
        P.diag[k] = std::move(blk);
        if (k < n) {
            DiagBlock s(nn);
            const double cy2 = cw(k + 1);
            for (int i = 0; i < nn; ++i)
                s(i) = Complex(-hh * cw(i), 0.0) /
                       (d * d * cw(i) * std::sqrt(cy * cy2));
            P.sub[k] = s;
        }
    }
    return P;
}

SpectrumResult square_solve(const ProblemSpec& spec) {
    spec.validate();
    if (spec.domain != Domain::Square) throw Error("square_solve: not a square");
    const int n = auto_square_n(spec);
    const auto P = square_operator(spec, n);
    const double level = spec.lambda * spec.h;
    const double threshold = 1.2 * level;
    const double sigma = 0.5 * level;

    SpectrumResult res;
    res.eigenvalues = sparse::clustered_eigenvalues_below(
        P, threshold, sigma, {}, 1e-9 * std::max(1.0, level));
    res.threshold = threshold;
    res.h = spec.h;
    res.lambda = spec.lambda;
    auto [E, N] = energy_and_count(res.eigenvalues, threshold, spec.lambda, spec.h);
    res.E = E;
    res.N = N;
    return res;
}

int square_count_below(const ProblemSpec& spec, double level) {
    spec.validate();
    const int n = auto_square_n(spec);
    const auto P = square_operator(spec, n);
    return sparse::count_below(P, level);
}

ConvergenceReport convergence_study(const ProblemSpec& base,
                                    const std::vector<double>& h_list,
                                    double limit_E, double limit_N) {
    if (h_list.empty()) throw Error("convergence_study: empty h list");
    for (size_t i = 1; i < h_list.size(); ++i)
        if (h_list[i] >= h_list[i - 1])
            throw Error("convergence_study: h list must be strictly decreasing");

    ConvergenceReport rep;
    rep.limit_E = limit_E;
    rep.limit_N = limit_N;
    for (double h : h_list) {
        ProblemSpec spec = base;
        spec.h = h;
        try {
            const SpectrumResult r = base.domain == Domain::Disk
                                         ? disk_fiber_solve(spec)
                                         : square_solve(spec);
            ConvergenceRow row;
            row.h = h;
            row.E = r.E;
            row.N = r.N;
            row.scaled_E = r.E / std::sqrt(h);
            row.scaled_N = r.N * std::sqrt(h);
            row.err_E = limit_E != 0.0 ? std::abs(row.scaled_E - limit_E) /
                                             std::abs(limit_E)
                                       : 0.0;
            row.err_N = limit_N != 0.0 ? std::abs(row.scaled_N - limit_N) /
                                             std::abs(limit_N)
                                       : 0.0;
            rep.rows.push_back(row);
        } catch (const BudgetExceeded& e) {
            rep.partial = true;
            rep.note = e.what();
            break;
        }
    }
    // Richardson extrapolation over the last three rows (unknown order).
    if (rep.rows.size() >= 3) {
        const auto& r = rep.rows;
        const size_t k = r.size();
        const double v1 = r[k - 3].scaled_E, v2 = r[k - 2].scaled_E,
                     v3 = r[k - 1].scaled_E;
        const double q = (v2 - v1) / (v3 - v2);
        // Extrapolate only when the differences contract geometrically;
        // otherwise the correction term is ill-conditioned.
        if (std::isfinite(q) && q > 1.2)
            rep.extrapolated_E = v3 + (v3 - v2) / (q - 1.0);
        else
            rep.extrapolated_E = v3;
    } else if (!rep.rows.empty()) {
        rep.extrapolated_E = rep.rows.back().scaled_E;
    }
    return rep;
}

ProbeResult form_lower_bound_probe(const ProblemSpec& spec, int nr,
                                   int ntheta) {
    spec.validate();
    if (spec.gamma_theta.empty())
        throw Error("form_lower_bound_probe: needs sampled boundary gamma");
    if (nr == 0) nr = 96;
    if (ntheta == 0) ntheta = static_cast<int>(spec.gamma_theta.size());

    auto bottom_at = [&](int nr_k, int nt_k) {
        ProblemSpec s = spec;
        // resample gamma to the working grid by cell averaging
        const int src = static_cast<int>(spec.gamma_theta.size());
        std::vector<double> g(nt_k, 0.0);
        for (int t = 0; t < nt_k; ++t) {
            const double a = static_cast<double>(t) * src / nt_k;
            const double b = static_cast<double>(t + 1) * src / nt_k;
            double acc = 0.0;
            for (int j = static_cast<int>(std::floor(a));
                 j < static_cast<int>(std::ceil(b)); ++j) {
                const double lo = std::max(a, static_cast<double>(j));
                const double hi = std::min(b, static_cast<double>(j + 1));
                if (hi > lo) acc += (hi - lo) * spec.gamma_theta[j % src];
            }
            g[t] = acc / (b - a);
        }
        s.gamma_theta = std::move(g);
        const auto P = polar_disk_operator(s, nr_k, nt_k, true);
        const double guess =
            -2.0 * std::pow(spec.h, 2.0 * spec.alpha) *
                (*std::min_element(spec.gamma_theta.begin(),
                                   spec.gamma_theta.end())) *
                (*std::min_element(spec.gamma_theta.begin(),
                                   spec.gamma_theta.end())) -
            1.0;
        return sparse::lowest_eigenvalue(P, guess, 1e-9);
    };

    ProbeResult out;
    out.bottom = bottom_at(nr, ntheta);
    out.bottom_refined = bottom_at(nr * 3 / 2, ntheta * 3 / 2);
    out.rel_change = std::abs(out.bottom_refined - out.bottom) /
                     std::max(1e-12, std::abs(out.bottom_refined));
    return out;
}

} // namespace robinband::solver2d
