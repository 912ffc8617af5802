#include "robinband/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "robinband/errors.hpp"
#include "robinband/util.hpp"

namespace robinband::semicl {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
} // namespace

FieldOnBoundary FieldOnBoundary::constant(double b, int n_nodes) {
    FieldOnBoundary f;
    f.b = b;
    f.B_samples.assign(n_nodes, b);
    f.validate();
    return f;
}

void FieldOnBoundary::validate() const {
    if (b <= 0.0) throw Error("FieldOnBoundary: b must be positive");
    for (double v : B_samples)
        if (v < b - 1e-12) throw Error("FieldOnBoundary: sample below b");
}

RobinTrace RobinTrace::constant(double gamma, int n_nodes, double ds) {
    return from_samples(std::vector<double>(n_nodes, gamma), ds, true);
}

RobinTrace RobinTrace::from_samples(std::vector<double> samples, double ds,
                                    bool bounded) {
    RobinTrace t;
    t.gamma_samples = std::move(samples);
    t.ds = ds;
    t.refresh_norms(bounded);
    return t;
}

void RobinTrace::refresh_norms(bool bounded) {
    double p3 = 0.0, sup = 0.0;
    for (double g : gamma_samples) {
        p3 += std::abs(g) * std::abs(g) * std::abs(g) * ds;
        sup = std::max(sup, std::abs(g));
    }
    p3_norm = std::cbrt(p3);
    if (!std::isfinite(p3_norm)) throw Error("RobinTrace: L^3 norm not finite");
    if (bounded)
        essential_sup = sup;
    else
        essential_sup.reset();
}

namespace {

// Band access for the density integrals: table interpolation or direct
// two-grid finite differences.
struct TableBand {
    const band1d::BandTable& table;
    double mu(int p, double gamma, double xi) const {
        return table.interp(p, gamma, xi);
    }
    int max_band() const { return table.p_max; }
    double xi_lo() const { return table.xi_grid.front(); }
    double xi_hi() const { return table.xi_grid.back(); }
};

struct DirectBand {
    band1d::HalfLineDiscretization disc;
    // Direct solves are memoized; the density quadrature revisits points.
    mutable std::map<std::pair<int, long long>, double> cache;
    double gamma = 0.0;

    double mu(int p, double gamma_val, double xi) const {
        const long long key = llround(xi * 1e12);
        auto it = cache.find({p, key});
        if (it != cache.end()) return it->second;
        auto d = band1d::HalfLineDiscretization::for_xi(xi, disc.spacing());
        d.richardson = disc.richardson;
        const double v = band1d::mu_fd(p, {gamma_val, xi}, d);
        cache.insert({{p, key}, v});
        return v;
    }
    int max_band() const { return 8; }
    double xi_lo() const { return -8.0; }
    double xi_hi() const { return 10.0; }
};

// Roots of mu_p(gamma, .) = level flanking the band minimum, on whatever
// band accessor is given. Returns false when the sublevel set is empty.
template <class Band>
bool band_roots(const Band& band, int p, double gamma, double level,
                double& lo, double& hi) {
    const double a = band.xi_lo(), b = band.xi_hi();
    const int scan_n = 160;
    int imin = -1;
    double vmin = level;
    for (int i = 0; i <= scan_n; ++i) {
        const double xi = a + (b - a) * i / scan_n;
        const double v = band.mu(p, gamma, xi);
        if (v < vmin) {
            vmin = v;
            imin = i;
        }
    }
    if (imin < 0) return false;
    const double step = (b - a) / scan_n;
    const double xi_min = a + step * imin;
    auto bisect = [&](double x0, double x1, bool rising) {
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (x0 + x1);
            const bool above = band.mu(p, gamma, m) > level;
            if (above == rising)
                x1 = m;
            else
                x0 = m;
        }
        return 0.5 * (x0 + x1);
    };
    double left = xi_min;
    while (left > a && band.mu(p, gamma, left) < level) left -= step;
    lo = bisect(left, xi_min, false);
    double right = xi_min;
    while (right < b && band.mu(p, gamma, right) < level) right += step;
    if (right >= b && band.mu(p, gamma, right) < level) {
        // sublevel set runs into the window edge (level ~ the xi->inf
        // limit); the Gaussian closure makes the tail contribution
        // negligible beyond the window chosen by xi_window
        hi = b;
    } else {
        hi = bisect(xi_min, right, true);
    }
    return lo < hi;
}

template <class Band>
double density_energy_impl(const Band& band, double gamma_val, double b_val,
                           double lambda, double tol) {
    if (b_val <= 0.0) throw Error("density_energy: b must be positive");
    if (lambda > b_val) throw LevelAboveField("lambda exceeds b");
    const double level = lambda / b_val;
    const double gamma_scaled = gamma_val / std::sqrt(b_val);

    double sum = 0.0;
    for (int p = 1; p <= band.max_band(); ++p) {
        double lo, hi;
        if (!band_roots(band, p, gamma_scaled, level, lo, hi)) break;
        auto f = [&](double xi) {
            const double v = band.mu(p, gamma_scaled, xi);
            return v < level ? level - v : 0.0;
        };
        sum += util::integrate(f, lo, hi, tol);
    }
    return sum;
}

template <class Band>
double density_count_impl(const Band& band, double gamma_val, double b_val,
                          double lambda) {
    if (b_val <= 0.0) throw Error("density_count: b must be positive");
    if (lambda >= b_val) throw LevelNotBelowField("lambda must be below b");
    const double level = lambda / b_val;
    const double gamma_scaled = gamma_val / std::sqrt(b_val);
    double sum = 0.0;
    for (int p = 1; p <= band.max_band(); ++p) {
        double lo, hi;
        if (!band_roots(band, p, gamma_scaled, level, lo, hi)) break;
        sum += hi - lo;
    }
    return sum;
}

} // namespace

int p_truncation(double gamma_min, double level,
                 const band1d::BandTable& table) {
    if (!std::isfinite(gamma_min)) throw Error("p_truncation: gamma not finite");
    for (int p = 1; p < table.p_max; ++p) {
        double vmin = std::numeric_limits<double>::infinity();
        for (double xi : table.xi_grid)
            vmin = std::min(vmin, table.interp(p + 1, gamma_min, xi));
        if (vmin > level) return p;
    }
    throw TableTooSmall("band table exhausted before the truncation index");
}

double xi_window(double gamma_lo, double level, double tol,
                 const band1d::BandTable& table) {
    // Envelope fit of the Gaussian closure |mu_1 - 1| <= C (1+|g|) xi e^{-xi^2}.
    double C = 0.0;
    for (double xi : {2.5, 3.0, 3.5}) {
        if (xi > table.xi_grid.back()) break;
        const double dev = std::abs(table.interp(1, gamma_lo, xi) - 1.0);
        C = std::max(C, dev / ((1.0 + std::abs(gamma_lo)) * xi *
                               std::exp(-xi * xi)));
    }
    C = std::max(C, 1.0);
    const double k_tail = std::sqrt(std::max(
        1.0, std::log(C * (1.0 + std::abs(gamma_lo)) / (2.0 * tol))));

    double k_cross = 1.0;
    if (level < 1.0) {
        double lo, hi;
        TableBand band{table};
        if (band_roots(band, 1, gamma_lo, level, lo, hi))
            k_cross = std::max(std::abs(lo), std::abs(hi)) + 0.5;
    }
    return std::max(k_tail, k_cross);
}

double density_energy(double gamma_val, double b_val, double lambda,
                      const band1d::BandTable& table, double tol) {
    return density_energy_impl(TableBand{table}, gamma_val, b_val, lambda, tol);
}

double density_energy_direct(double gamma_val, double b_val, double lambda,
                             const band1d::HalfLineDiscretization& disc,
                             double tol) {
    DirectBand band;
    band.disc = disc;
    return density_energy_impl(band, gamma_val, b_val, lambda, tol);
}

double density_count(double gamma_val, double b_val, double lambda,
                     const band1d::BandTable& table) {
    return density_count_impl(TableBand{table}, gamma_val, b_val, lambda);
}

double density_count_direct(double gamma_val, double b_val, double lambda,
                            const band1d::HalfLineDiscretization& disc) {
    DirectBand band;
    band.disc = disc;
    return density_count_impl(band, gamma_val, b_val, lambda);
}

double spectral_sum(double gamma, double tol,
                    const band1d::HalfLineDiscretization& disc) {
    return density_energy_direct(gamma, 1.0, 1.0, disc, tol);
}

namespace {

struct BoundaryAccumulator {
    double value = 0.0;
    double err = 0.0;
    int p_used = 0;
};

template <class PerNode>
BoundaryAccumulator boundary_sum(const geometry::BoundaryCurve& curve,
                                 const PerNode& fn) {
    // Periodic trapezoid over the uniform arc-length nodes.
    BoundaryAccumulator acc;
    const int n = curve.n();
    const double ds = curve.ds();
    for (int i = 0; i < n; ++i) acc.value += fn(i) * ds;
    return acc;
}

void check_inputs(const geometry::BoundaryCurve& curve,
                  const FieldOnBoundary& field, const RobinTrace& trace) {
    field.validate();
    if (static_cast<int>(field.B_samples.size()) != curve.n() ||
        static_cast<int>(trace.gamma_samples.size()) != curve.n())
        throw Error("limit: boundary samples do not match the curve nodes");
}

} // namespace

LimitResult energy_limit(const geometry::BoundaryCurve& curve,
                         const FieldOnBoundary& field, const RobinTrace& trace,
                         double lambda, double alpha,
                         const band1d::BandTable& table, double tol) {
    check_inputs(curve, field, trace);
    if (lambda > field.b) throw LevelAboveField("lambda exceeds b");
    if (alpha < 0.5) throw Error("energy_limit: alpha must be >= 1/2");
    LimitResult res;
    const bool robin_branch = alpha == 0.5;
    if (robin_branch && !trace.essential_sup) {
        // The alpha = 1/2 statement assumes bounded gamma; the value is
        // still computed but flagged.
        res.unproven_regime = true;
    }

    double gamma_min = 0.0;
    if (robin_branch)
        for (size_t i = 0; i < trace.gamma_samples.size(); ++i)
            gamma_min = std::min(gamma_min, trace.gamma_samples[i] /
                                                std::sqrt(field.B_samples[i]));
    res.p_max_used = p_truncation(gamma_min, lambda / field.b, table);
    res.K_window = xi_window(gamma_min, lambda / field.b, tol, table);

    const double node_tol = tol / curve.total_length();
    std::map<std::pair<long long, long long>, double> memo;
    auto per_node = [&](int i) {
        const double B = field.B_samples[i];
        const double g = robin_branch ? trace.gamma_samples[i] : 0.0;
        const auto key = std::make_pair(llround(g * 1e12), llround(B * 1e12));
        auto it = memo.find(key);
        double dens;
        if (it != memo.end()) {
            dens = it->second;
        } else {
            dens = density_energy(g, B, lambda, table, node_tol);
            memo.insert({key, dens});
        }
        return std::pow(B, 1.5) * dens;
    };
    const auto acc = boundary_sum(curve, per_node);
    res.value = acc.value / (2.0 * kPi);
    // accumulated tolerance of the per-node adaptive integrals
    double wsum = 0.0;
    for (double B : field.B_samples) wsum += std::pow(B, 1.5) * curve.ds();
    res.quadrature_error_estimate = node_tol * wsum / (2.0 * kPi);
    return res;
}

LimitResult count_limit(const geometry::BoundaryCurve& curve,
                        const FieldOnBoundary& field, const RobinTrace& trace,
                        double lambda, double alpha,
                        const band1d::BandTable& table, double tol) {
    check_inputs(curve, field, trace);
    if (lambda >= field.b)
        throw LevelNotBelowField("the count limit requires lambda < b");
    if (alpha < 0.5) throw Error("count_limit: alpha must be >= 1/2");
    LimitResult res;
    const bool robin_branch = alpha == 0.5;
    if (robin_branch && !trace.essential_sup) res.unproven_regime = true;

    double gamma_min = 0.0;
    if (robin_branch)
        for (size_t i = 0; i < trace.gamma_samples.size(); ++i)
            gamma_min = std::min(gamma_min, trace.gamma_samples[i] /
                                                std::sqrt(field.B_samples[i]));
    res.p_max_used = p_truncation(gamma_min, lambda / field.b, table);
    res.K_window = xi_window(gamma_min, lambda / field.b, tol, table);

    std::map<std::pair<long long, long long>, double> memo;
    auto per_node = [&](int i) {
        const double B = field.B_samples[i];
        const double g = robin_branch ? trace.gamma_samples[i] : 0.0;
        const auto key = std::make_pair(llround(g * 1e12), llround(B * 1e12));
        auto it = memo.find(key);
        double dens;
        if (it != memo.end()) {
            dens = it->second;
        } else {
            dens = density_count(g, B, lambda, table);
            memo.insert({key, dens});
        }
        return std::sqrt(B) * dens;
    };
    const auto acc = boundary_sum(curve, per_node);
    res.value = acc.value / (2.0 * kPi);
    double wsum = 0.0;
    for (double B : field.B_samples) wsum += std::sqrt(B) * curve.ds();
    res.quadrature_error_estimate =
        std::min(tol, 1e-8 * res.p_max_used * wsum / (2.0 * kPi));
    return res;
}

RobinTrace mollify(const RobinTrace& trace, double a) {
    if (a <= 0.0) throw Error("mollify: width must be positive");
    const int n = static_cast<int>(trace.gamma_samples.size());
    const double L = n * trace.ds;
    RobinTrace out = trace;
    for (int i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k < n; ++k) {
            double d = std::abs(i - k) * trace.ds;
            d = std::min(d, L - d); // periodic distance
            const double w = std::exp(-(d / a) * (d / a));
            num += w * trace.gamma_samples[k];
            den += w;
        }
        out.gamma_samples[i] = num / den;
    }
    out.refresh_norms(trace.essential_sup.has_value());
    return out;
}

} // namespace robinband::semicl
