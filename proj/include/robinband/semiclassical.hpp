#ifndef ROBINBAND_SEMICLASSICAL_HPP
#define ROBINBAND_SEMICLASSICAL_HPP

#include <optional>
#include <vector>

#include "robinband/band1d.hpp"
#include "robinband/geometry.hpp"

namespace robinband::semicl {

// Magnetic field restricted to the boundary nodes of a curve, together
// with b = inf over the closed domain.
struct FieldOnBoundary {
    std::vector<double> B_samples;
    double b = 0.0;

    static FieldOnBoundary constant(double b, int n_nodes);
    void validate() const; // every sample >= b > 0
};

// Robin coefficient sampled on the boundary nodes. `ds` is the arc-length
// node spacing of the carrying curve.
struct RobinTrace {
    std::vector<double> gamma_samples;
    double ds = 0.0;
    double p3_norm = 0.0;
    std::optional<double> essential_sup;

    static RobinTrace constant(double gamma, int n_nodes, double ds);
    static RobinTrace from_samples(std::vector<double> samples, double ds,
                                   bool bounded = true);
    void refresh_norms(bool bounded);
};

struct LimitResult {
    double value = 0.0;
    int p_max_used = 0;
    double K_window = 0.0;
    double quadrature_error_estimate = 0.0;
    bool unproven_regime = false; // alpha = 1/2 with unbounded gamma
};

// Smallest p0 such that inf_xi mu_{p0+1}(gamma_min, xi) > level over the
// table window (gamma-monotonicity covers every gamma >= gamma_min).
int p_truncation(double gamma_min, double level, const band1d::BandTable& table);

// Window half-width K: the xi-tail of the energy density beyond [-K, K]
// is below tol (Gaussian closure of mu_1 to 1), and the sublevel set at
// `level` is contained in [-K, K].
double xi_window(double gamma_lo, double level, double tol,
                 const band1d::BandTable& table);

// Energy density sum_p int (mu_p(b^{-1/2} gamma, xi) - lambda/b)_- dxi.
double density_energy(double gamma_val, double b_val, double lambda,
                      const band1d::BandTable& table, double tol);

// Reference-quality variant solving the bands directly (two-grid
// extrapolated finite differences) instead of table interpolation.
double density_energy_direct(double gamma_val, double b_val, double lambda,
                             const band1d::HalfLineDiscretization& disc,
                             double tol);

// Count density sum_p |{xi : mu_p < lambda/b}| (sum of root widths).
double density_count(double gamma_val, double b_val, double lambda,
                     const band1d::BandTable& table);
double density_count_direct(double gamma_val, double b_val, double lambda,
                            const band1d::HalfLineDiscretization& disc);

// Spectral sum J(gamma) = sum_p int (mu_p(gamma, xi) - 1)_- dxi.
double spectral_sum(double gamma, double tol,
                    const band1d::HalfLineDiscretization& disc);

// The h->0 limit functionals. The alpha > 1/2 branch uses the Neumann
// band; alpha = 1/2 uses gamma(x) pointwise and requires a sup bound
// unless unproven_regime reporting is acceptable to the caller.
LimitResult energy_limit(const geometry::BoundaryCurve& curve,
                         const FieldOnBoundary& field, const RobinTrace& trace,
                         double lambda, double alpha,
                         const band1d::BandTable& table, double tol);

LimitResult count_limit(const geometry::BoundaryCurve& curve,
                        const FieldOnBoundary& field, const RobinTrace& trace,
                        double lambda, double alpha,
                        const band1d::BandTable& table, double tol);

// Periodic Gaussian mollification of the trace at width a.
RobinTrace mollify(const RobinTrace& trace, double a);

} // namespace robinband::semicl

#endif
