#include "robinband/band1d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "robinband/util.hpp"

namespace robinband::band1d {

HalfLineDiscretization HalfLineDiscretization::for_xi(double xi_abs_max,
                                                      double spacing) {
    HalfLineDiscretization d;
    d.L = std::abs(xi_abs_max) + 12.0;
    d.n = std::max(200, static_cast<int>(std::ceil(d.L / spacing)));
    return d;
}

void HalfLineDiscretization::validate(double xi) const {
    if (L < std::abs(xi) + 10.0)
        throw Error("HalfLineDiscretization: L < |xi| + 10");
    if (n < 200) throw Error("HalfLineDiscretization: n < 200");
    if (spacing() > 0.05) throw Error("HalfLineDiscretization: spacing > 0.05");
}

namespace {

// Symmetrized tridiagonal of the lumped quadratic form on [0, L]:
//   Q(u) = sum (u_{i+1}-u_i)^2/dt + sum V_i u_i^2 w_i + gamma u_0^2
// with weights w_0 = dt/2, w_i = dt and a Dirichlet wall at L. The mass
// weights make the Robin row symmetric without a ghost node.
tridiag::SymTridiag assemble(double gamma, double xi, double L, int n) {
    const double dt = L / n;
    tridiag::SymTridiag m;
    m.diag.resize(n);
    m.off.assign(n - 1, -1.0 / (dt * dt));
    for (int i = 0; i < n; ++i) {
        const double t = i * dt;
        const double v = (t - xi) * (t - xi);
        m.diag[i] = 2.0 / (dt * dt) + v;
    }
    m.diag[0] += 2.0 * gamma / dt;
    m.off[0] = -std::sqrt(2.0) / (dt * dt);
    return m;
}

double mu_fd_single(int j, double gamma, double xi, double L, int n) {
    const auto m = assemble(gamma, xi, L, n);
    return tridiag::eigenvalue(m, j);
}

struct PruferResult {
    double theta_end;
};

// Prufer phase integration of -v'' + (t-xi)^2 v = mu v from the Robin ray
// at t=0 (cot(theta) = gamma) to L. Eigenvalue j solves theta(L) = j*pi.
// theta(L; mu) is strictly increasing in mu.
PruferResult prufer(double mu, double gamma, double xi, double L,
                    double tol) {
    const double pi = 3.141592653589793238462643383279502884;
    double theta = std::atan2(1.0, gamma); // in (0, pi)
    auto rhs = [&](double t, double th) {
        const double q = (t - xi) * (t - xi) - mu;
        const double s = std::sin(th), c = std::cos(th);
        return c * c - q * s * s;
    };
    // Cash-Karp embedded RK45 with adaptive step.
    static const double a2 = 1.0 / 5, a3 = 3.0 / 10, a4 = 3.0 / 5, a5 = 1.0,
                        a6 = 7.0 / 8;
    static const double b21 = 1.0 / 5;
    static const double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static const double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    static const double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27,
                        b54 = 35.0 / 27;
    static const double b61 = 1631.0 / 55296, b62 = 175.0 / 512,
                        b63 = 575.0 / 13824, b64 = 44275.0 / 110592,
                        b65 = 253.0 / 4096;
    static const double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                        c6 = 512.0 / 1771;
    static const double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384,
                        d4 = 13525.0 / 55296, d5 = 277.0 / 14336,
                        d6 = 1.0 / 4;
    double t = 0.0;
    double h = 1e-3;
    const double hmax = 5e-2, hmin = 1e-9;
    while (t < L) {
        if (t + h > L) h = L - t;
        const double k1 = rhs(t, theta);
        const double k2 = rhs(t + a2 * h, theta + h * b21 * k1);
        const double k3 = rhs(t + a3 * h, theta + h * (b31 * k1 + b32 * k2));
        const double k4 =
            rhs(t + a4 * h, theta + h * (b41 * k1 + b42 * k2 + b43 * k3));
        const double k5 = rhs(
            t + a5 * h, theta + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
        const double k6 =
            rhs(t + a6 * h, theta + h * (b61 * k1 + b62 * k2 + b63 * k3 +
                                         b64 * k4 + b65 * k5));
        const double next = theta + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
        const double embed =
            theta + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
        const double err = std::abs(next - embed);
        const double limit = tol * std::max(1.0, std::abs(theta));
        if (err <= limit || h <= hmin) {
            t += h;
            theta = next;
        }
        const double grow =
            err > 0.0 ? 0.9 * std::pow(limit / err, 0.2) : 5.0;
        h = std::clamp(h * std::clamp(grow, 0.2, 5.0), hmin, hmax);
    }
    (void)pi;
    return {theta};
}

} // namespace

double mu_fd(int j, const RobinOscillatorParams& p,
             const HalfLineDiscretization& disc) {
    disc.validate(p.xi);
    if (j < 1 || j > disc.n / 4) throw Error("mu: band index out of range");
    const double coarse = mu_fd_single(j, p.gamma, p.xi, disc.L, disc.n);
    if (!disc.richardson) return coarse;
    const double fine = mu_fd_single(j, p.gamma, p.xi, disc.L, 2 * disc.n);
    return (4.0 * fine - coarse) / 3.0;
}

double mu_shooting(int j, const RobinOscillatorParams& p,
                   const HalfLineDiscretization& disc) {
    disc.validate(p.xi);
    if (j < 1 || j > disc.n / 4) throw Error("mu: band index out of range");
    const double pi = 3.141592653589793238462643383279502884;
    const double target = j * pi;
    const double ode_tol = 1e-12;
    auto phase = [&](double mu) {
        return prufer(mu, p.gamma, p.xi, disc.L, ode_tol).theta_end - target;
    };
    // Bracket using the monotonicity of the end phase in mu.
    double lo = -2.0 * (1.0 + p.gamma * p.gamma);
    double hi = 4.0 * j + std::max(0.0, p.xi * p.xi) + 8.0;
    while (phase(lo) > 0.0) lo = 2.0 * lo - 4.0;
    while (phase(hi) < 0.0) hi = 2.0 * hi + 4.0;
    for (int it = 0; it < 120 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi));
         ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phase(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double mu(int j, const RobinOscillatorParams& p,
          const HalfLineDiscretization& disc) {
    return disc.scheme == Scheme::Shooting ? mu_shooting(j, p, disc)
                                           : mu_fd(j, p, disc);
}

double mu_cross_validated(int j, const RobinOscillatorParams& p,
                          const HalfLineDiscretization& disc, double tol) {
    const double a = mu_fd(j, p, disc);
    const double b = mu_shooting(j, p, disc);
    if (std::abs(a - b) > tol) {
        // One retry at doubled resolution before giving up.
        HalfLineDiscretization fine = disc;
        fine.n *= 2;
        const double a2 = mu_fd(j, p, fine);
        const double b2 = mu_shooting(j, p, fine);
        if (std::abs(a2 - b2) > tol) {
            std::ostringstream os;
            os << "mu schemes disagree: fd=" << std::setprecision(15) << a2
               << " shooting=" << b2 << " at j=" << j << " gamma=" << p.gamma
               << " xi=" << p.xi;
            throw UnresolvedBand(os.str());
        }
        return 0.5 * (a2 + b2);
    }
    return 0.5 * (a + b);
}

Eigenfunction eigenfunction(int j, const RobinOscillatorParams& p,
                            const HalfLineDiscretization& disc) {
    disc.validate(p.xi);
    if (j < 1 || j > disc.n / 4) throw Error("eigenfunction: band index out of range");
    const int n = disc.n;
    const double dt = disc.L / n;
    const auto m = assemble(p.gamma, p.xi, disc.L, n);
    const double lam = tridiag::eigenvalue(m, j);
    auto v = tridiag::eigenvector(m, lam);

    Eigenfunction ef;
    ef.mu = lam;
    ef.t.resize(n);
    ef.u.resize(n);
    ef.w.resize(n);
    for (int i = 0; i < n; ++i) {
        ef.t[i] = i * dt;
        ef.w[i] = i == 0 ? 0.5 * dt : dt;
        // undo the sqrt-mass symmetrization, then normalize below
        ef.u[i] = v[i] / std::sqrt(ef.w[i]);
    }
    double nrm2 = 0.0;
    for (int i = 0; i < n; ++i) nrm2 += ef.w[i] * ef.u[i] * ef.u[i];
    const double s = 1.0 / std::sqrt(nrm2);
    for (auto& x : ef.u) x *= s;

    // Residual of the symmetrized eigen-equation.
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = (m.diag[i] - lam) * v[i];
        if (i > 0) r += m.off[i - 1] * v[i - 1];
        if (i + 1 < n) r += m.off[i] * v[i + 1];
        res = std::max(res, std::abs(r));
    }
    ef.discrete_residual = res / std::max(1.0, std::abs(lam));

    double m1 = 0.0;
    for (int i = 0; i < n; ++i) m1 += ef.w[i] * ef.t[i] * ef.u[i] * ef.u[i];
    ef.centroid = m1;

    // Sign convention: positive at the boundary for the ground state
    // (positive ground state), positive first lobe otherwise.
    if (ef.u[0] < 0.0 && j == 1)
        for (auto& x : ef.u) x = -x;
    return ef;
}

double Eigenfunction::tail_mass(double t_from) const {
    double s = 0.0;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_from) s += w[i] * u[i] * u[i];
    return s;
}

double boundary_value_sq(int j, const RobinOscillatorParams& p,
                         const HalfLineDiscretization& disc) {
    const auto ef_c = eigenfunction(j, p, disc);
    HalfLineDiscretization fine = disc;
    fine.n *= 2;
    const auto ef_f = eigenfunction(j, p, fine);
    const double c = ef_c.value0() * ef_c.value0();
    const double f = ef_f.value0() * ef_f.value0();
    const double val = disc.richardson ? (4.0 * f - c) / 3.0 : c;

    const double gm = std::max(0.0, -p.gamma);
    const double muv = disc.richardson
                           ? (4.0 * ef_f.mu - ef_c.mu) / 3.0
                           : ef_c.mu;
    if (val > 4.0 * muv + 8.0 * gm * gm + 2.0 + 1e-9)
        throw Error("boundary_value_sq: a-priori bound violated");
    return val;
}

namespace {

struct MuAndCentroid {
    double mu;
    double m1;
};

MuAndCentroid mu_and_centroid(int j, double gamma, double xi, double L,
                              int n) {
    const double dt = L / n;
    const auto m = assemble(gamma, xi, L, n);
    const double lam = tridiag::eigenvalue(m, j);
    const auto v = tridiag::eigenvector(m, lam);
    double m1 = 0.0, nrm = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = i == 0 ? 0.5 * dt : dt;
        const double u = v[i] / std::sqrt(w);
        m1 += w * (i * dt) * u * u;
        nrm += w * u * u;
    }
    return {lam, m1 / nrm};
}

// Minimum of the discrete band on a fixed grid: golden bracket plus
// bisection of the Feynman-Hellmann derivative  mu'(xi) = -2 (m1 - xi).
ThetaResult theta_on_grid(int j, double gamma, double L, int n, double xi_lo,
                          double xi_hi) {
    auto muv = [&](double xi) { return mu_fd_single(j, gamma, xi, L, n); };
    auto deriv_sign = [&](double xi) {
        const auto mc = mu_and_centroid(j, gamma, xi, L, n);
        return xi - mc.m1; // sign of mu'(xi)/2
    };

    const int scan_n = 41;
    double best = xi_lo;
    double best_v = muv(xi_lo);
    int best_i = 0;
    for (int i = 1; i < scan_n; ++i) {
        const double x = xi_lo + (xi_hi - xi_lo) * i / (scan_n - 1);
        const double v = muv(x);
        if (v < best_v) {
            best_v = v;
            best = x;
            best_i = i;
        }
    }
    if (best_i == 0 || best_i == scan_n - 1)
        throw NoInteriorMinimum("band minimum outside scan window");

    const double step = (xi_hi - xi_lo) / (scan_n - 1);
    double a = best - step, b = best + step;
    // Golden section to a narrow bracket.
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = muv(x1), f2 = muv(x2);
    while (b - a > 1e-3) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = muv(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = muv(x2);
        }
    }
    // Derivative bisection pins the argmin far below the golden-section
    // noise floor.
    double da = deriv_sign(a), db = deriv_sign(b);
    if (da > 0.0 || db < 0.0) {
        // The derivative did not change sign across the bracket; fall back
        // to the golden-section midpoint.
        const double xm = 0.5 * (a + b);
        return {muv(xm), xm};
    }
    for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
        const double m = 0.5 * (a + b);
        if (deriv_sign(m) <= 0.0)
            a = m;
        else
            b = m;
    }
    const double xm = 0.5 * (a + b);
    return {muv(xm), xm};
}

} // namespace

ThetaResult theta(double gamma, int j, const HalfLineDiscretization& disc) {
    double xi_lo = -2.0, xi_hi = 8.0;
    for (int attempt = 0;; ++attempt) {
        const double L = std::max(disc.L, std::abs(xi_hi) + 12.0);
        const int n = std::max(disc.n, static_cast<int>(L / disc.spacing()));
        try {
            const auto coarse = theta_on_grid(j, gamma, L, n, xi_lo, xi_hi);
            if (!disc.richardson) return coarse;
            const auto fine = theta_on_grid(j, gamma, L, 2 * n, xi_lo, xi_hi);
            return {(4.0 * fine.theta - coarse.theta) / 3.0,
                    (4.0 * fine.xi_min - coarse.xi_min) / 3.0};
        } catch (const NoInteriorMinimum&) {
            if (attempt >= 1) throw;
            xi_lo = -6.0;
            xi_hi = 16.0;
        }
    }
}

double xi_inf_limit(int j, double gamma, const HalfLineDiscretization& disc) {
    const double xi_cap = 8.0;
    HalfLineDiscretization d = disc;
    d.L = std::max(d.L, xi_cap + 12.0);
    d.n = std::max(d.n, static_cast<int>(d.L / disc.spacing()));
    return mu_fd(j, {gamma, xi_cap}, d);
}

XiRoots xi_roots(int j, double gamma, double b0,
                 const HalfLineDiscretization& disc) {
    const auto th = theta(gamma, j, disc);
    if (b0 <= th.theta + 1e-11)
        throw EmptyInterval("level at or below the band minimum");
    const double lim = xi_inf_limit(j, gamma, disc);
    if (b0 >= lim)
        throw UnboundedSublevel("level at or above the xi->inf band limit");

    auto muv = [&](double xi) {
        HalfLineDiscretization d = disc;
        d.L = std::max(d.L, std::abs(xi) + 12.0);
        d.n = std::max(d.n, static_cast<int>(std::ceil(d.L / disc.spacing())));
        return mu_fd(j, {gamma, xi}, d);
    };

    auto bisect = [&](double a, double b) {
        // mu(a) and mu(b) straddle b0.
        const bool rising = muv(b) > b0;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double v = muv(m);
            if (std::abs(v - b0) < 1e-9 || b - a < 1e-13) return m;
            const bool above = v > b0;
            if (above == rising)
                b = m;
            else
                a = m;
        }
        return 0.5 * (a + b);
    };

    // Left branch: mu decreases toward the minimum.
    double a = th.xi_min - 1.0;
    while (muv(a) < b0) a -= 1.0;
    const double lo = bisect(a, th.xi_min);

    // Right branch: mu rises back toward the xi->inf limit.
    double b = th.xi_min + 1.0;
    const double cap = th.xi_min + 40.0;
    while (muv(b) < b0) {
        b += 1.0;
        if (b > cap)
            throw UnboundedSublevel("no right crossing before the scan cap");
    }
    const double hi = bisect(th.xi_min, b);
    return {lo, hi};
}

double BandTable::at(int j, int ig, int ix) const {
    const int ng = static_cast<int>(gamma_grid.size());
    const int nx = static_cast<int>(xi_grid.size());
    return values[((j - 1) * ng + ig) * nx + ix];
}

bool BandTable::covers(double gamma, double xi) const {
    return gamma >= gamma_grid.front() && gamma <= gamma_grid.back() &&
           xi >= xi_grid.front() && xi <= xi_grid.back();
}

double BandTable::interp(int j, double gamma, double xi) const {
    if (j < 1 || j > p_max) throw Error("BandTable::interp: band out of range");
    if (!covers(gamma, xi)) throw Error("BandTable::interp: point outside grid");
    auto locate = [](const std::vector<double>& g, double x) {
        auto it = std::upper_bound(g.begin(), g.end(), x);
        int i = static_cast<int>(it - g.begin()) - 1;
        return std::clamp(i, 0, static_cast<int>(g.size()) - 2);
    };
    const int ig = gamma_grid.size() > 1 ? locate(gamma_grid, gamma) : 0;
    const int ix = locate(xi_grid, xi);
    const double fx = (xi - xi_grid[ix]) / (xi_grid[ix + 1] - xi_grid[ix]);
    if (gamma_grid.size() == 1)
        return (1 - fx) * at(j, 0, ix) + fx * at(j, 0, ix + 1);
    const double fg =
        (gamma - gamma_grid[ig]) / (gamma_grid[ig + 1] - gamma_grid[ig]);
    const double v00 = at(j, ig, ix), v01 = at(j, ig, ix + 1);
    const double v10 = at(j, ig + 1, ix), v11 = at(j, ig + 1, ix + 1);
    return (1 - fg) * ((1 - fx) * v00 + fx * v01) +
           fg * ((1 - fx) * v10 + fx * v11);
}

void BandTable::audit(double tol) const {
    const int ng = static_cast<int>(gamma_grid.size());
    const int nx = static_cast<int>(xi_grid.size());
    for (int j = 1; j <= p_max; ++j)
        for (int ig = 0; ig < ng; ++ig)
            for (int ix = 0; ix < nx; ++ix) {
                if (j < p_max && at(j + 1, ig, ix) <= at(j, ig, ix) + tol)
                    throw Error("BandTable: j-monotonicity violated");
                if (ig + 1 < ng && at(j, ig + 1, ix) < at(j, ig, ix) - tol)
                    throw Error("BandTable: gamma-monotonicity violated");
            }
}

void BandTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("BandTable::save: cannot open " + path);
    out << "# j gamma xi mu\n";
    out << std::setprecision(17);
    const int ng = static_cast<int>(gamma_grid.size());
    const int nx = static_cast<int>(xi_grid.size());
    for (int j = 1; j <= p_max; ++j)
        for (int ig = 0; ig < ng; ++ig)
            for (int ix = 0; ix < nx; ++ix)
                out << j << ' ' << gamma_grid[ig] << ' ' << xi_grid[ix] << ' '
                    << at(j, ig, ix) << '\n';
}

BandTable BandTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("BandTable::load: cannot open " + path);
    std::string line;
    BandTable t;
    struct Row {
        int j;
        double g, x, m;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        Row r;
        if (is >> r.j >> r.g >> r.x >> r.m) rows.push_back(r);
    }
    for (const auto& r : rows) {
        if (std::find(t.gamma_grid.begin(), t.gamma_grid.end(), r.g) ==
            t.gamma_grid.end())
            t.gamma_grid.push_back(r.g);
        if (std::find(t.xi_grid.begin(), t.xi_grid.end(), r.x) ==
            t.xi_grid.end())
            t.xi_grid.push_back(r.x);
        t.p_max = std::max(t.p_max, r.j);
    }
    std::sort(t.gamma_grid.begin(), t.gamma_grid.end());
    std::sort(t.xi_grid.begin(), t.xi_grid.end());
    const int ng = static_cast<int>(t.gamma_grid.size());
    const int nx = static_cast<int>(t.xi_grid.size());
    t.values.assign(static_cast<size_t>(t.p_max) * ng * nx, 0.0);
    auto idx = [&](const std::vector<double>& g, double x) {
        return static_cast<int>(std::lower_bound(g.begin(), g.end(), x) -
                                g.begin());
    };
    for (const auto& r : rows)
        t.values[((r.j - 1) * ng + idx(t.gamma_grid, r.g)) * nx +
                 idx(t.xi_grid, r.x)] = r.m;
    return t;
}

BandTable band_table(const std::vector<double>& gamma_grid,
                     const std::vector<double>& xi_grid, int p_max,
                     const HalfLineDiscretization& disc, int threads) {
    if (p_max < 1) throw Error("band_table: p_max must be >= 1");
    if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end()) ||
        !std::is_sorted(xi_grid.begin(), xi_grid.end()))
        throw Error("band_table: grids must be sorted");
    double xi_abs = 0.0;
    for (double x : xi_grid) xi_abs = std::max(xi_abs, std::abs(x));

    BandTable t;
    t.gamma_grid = gamma_grid;
    t.xi_grid = xi_grid;
    t.p_max = p_max;
    t.disc = disc;
    t.disc.L = std::max(disc.L, xi_abs + 12.0);
    t.disc.n = std::max(disc.n,
                        static_cast<int>(std::ceil(t.disc.L / disc.spacing())));
    const int ng = static_cast<int>(gamma_grid.size());
    const int nx = static_cast<int>(xi_grid.size());
    t.values.assign(static_cast<size_t>(p_max) * ng * nx, 0.0);

    util::parallel_for(ng * nx, threads, [&](int node) {
        const int ig = node / nx;
        const int ix = node % nx;
        // One assembly per grid resolution serves every band index.
        const auto mc = assemble(gamma_grid[ig], xi_grid[ix], t.disc.L, t.disc.n);
        const auto mf =
            assemble(gamma_grid[ig], xi_grid[ix], t.disc.L, 2 * t.disc.n);
        for (int j = 1; j <= p_max; ++j) {
            const double c = tridiag::eigenvalue(mc, j);
            const double f = tridiag::eigenvalue(mf, j);
            t.values[((j - 1) * ng + ig) * nx + ix] =
                disc.richardson ? (4.0 * f - c) / 3.0 : c;
        }
    });
    t.audit();
    return t;
}

} // namespace robinband::band1d
