#include "robinband/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace robinband::tridiag {

std::pair<double, double> gershgorin_bounds(const SymTridiag& m) {
    const int n = m.n();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < n; ++i) {
        const double bl = i > 0 ? std::abs(m.off[i - 1]) : 0.0;
        const double br = i + 1 < n ? std::abs(m.off[i]) : 0.0;
        lo = std::min(lo, m.diag[i] - bl - br);
        hi = std::max(hi, m.diag[i] + bl + br);
    }
    return {lo, hi};
}

int count_below(const SymTridiag& m, double x) {
    // LDL^T pivot sign count; the guard against vanishing pivots follows
    // the classical bisection codes (Barth-Martin-Wilkinson).
    const int n = m.n();
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
        const double b2 = i > 0 ? m.off[i - 1] * m.off[i - 1] : 0.0;
        d = (m.diag[i] - x) - b2 / d;
        if (std::abs(d) < tiny) d = -tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

double eigenvalue(const SymTridiag& m, int j, double abs_tol) {
    auto [lo, hi] = gershgorin_bounds(m);
    // Invariant: count_below(lo) < j <= count_below(hi).
    while (hi - lo > abs_tol + 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(std::abs(lo), std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(m, mid) >= j)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> eigenvalues_below(const SymTridiag& m, double threshold,
                                      double abs_tol) {
    const int k = count_below(m, threshold);
    std::vector<double> vals;
    vals.reserve(k);
    for (int j = 1; j <= k; ++j) vals.push_back(eigenvalue(m, j, abs_tol));
    return vals;
}

namespace {

// LU with partial pivoting for a tridiagonal system (dgttrf/dgttrs layout).
struct TriLU {
    std::vector<double> dl, d, du, du2;
    std::vector<char> perm;

    void factor(const SymTridiag& m, double shift) {
        const int n = m.n();
        d.resize(n);
        dl.assign(m.off.begin(), m.off.end());
        du.assign(m.off.begin(), m.off.end());
        du2.assign(n > 2 ? n - 2 : 0, 0.0);
        perm.assign(n > 1 ? n - 1 : 0, 0);
        for (int i = 0; i < n; ++i) d[i] = m.diag[i] - shift;
        for (int i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                const double piv = d[i] != 0.0 ? d[i] : 1e-300;
                const double fact = dl[i] / piv;
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
                if (i + 2 < n) du2[i] = 0.0;
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                perm[i] = 1;
            }
        }
    }

    void solve(std::vector<double>& b) const {
        const int n = static_cast<int>(d.size());
        for (int i = 0; i + 1 < n; ++i) {
            if (perm[i]) std::swap(b[i], b[i + 1]);
            b[i + 1] -= dl[i] * b[i];
        }
        auto safe = [](double x) { return x != 0.0 ? x : 1e-300; };
        b[n - 1] /= safe(d[n - 1]);
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / safe(d[n - 2]);
        for (int i = n - 3; i >= 0; --i)
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / safe(d[i]);
    }
};

} // namespace

std::vector<double> eigenvector(const SymTridiag& m, double lambda) {
    const int n = m.n();
    std::vector<double> v(n);
    std::mt19937 rng(12345u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& x : v) x = uni(rng);

    auto [glo, ghi] = gershgorin_bounds(m);
    const double scale = std::max({1.0, std::abs(glo), std::abs(ghi)});

    TriLU lu;
    lu.factor(m, lambda + 1e-13 * scale);
    for (int iter = 0; iter < 4; ++iter) {
        lu.solve(v);
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (auto& x : v) x /= nrm;
    }
    for (double x : v) {
        if (std::abs(x) > 1e-8) {
            if (x < 0.0)
                for (auto& y : v) y = -y;
            break;
        }
    }
    return v;
}

} // namespace robinband::tridiag
