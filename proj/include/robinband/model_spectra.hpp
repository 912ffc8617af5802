#ifndef ROBINBAND_MODEL_SPECTRA_HPP
#define ROBINBAND_MODEL_SPECTRA_HPP

#include <functional>
#include <vector>

#include "robinband/band1d.hpp"
#include "robinband/block_hermitian.hpp"

namespace robinband::model {

// Half-plane operator (-ih grad + b A0)^2 on R x R_+, A0 = (-t, 0), with
// Robin condition h^alpha gamma at t = 0. After the magnetic-length
// scaling its fibers are the band functions at the effective coefficient
// gamma_hb = h^(alpha-1/2) b^(-1/2) gamma.
struct HalfPlaneModel {
    double h = 1.0;
    double b = 1.0;
    double gamma = 0.0;
    double alpha = 1.0;

    double gamma_hb() const;
};

// Periodic strip [0,S] x (0, sqrt(h) T): periodic in s, Robin (Neumann
// when gamma = 0) at t = 0, Dirichlet at the top.
struct CylinderModel {
    double h = 1.0;
    double b = 1.0;
    double S = 1.0;
    double T = 1.0;
    double gamma = 0.0;  // Robin coefficient entering as h^alpha gamma
    double alpha = 1.0;

    double s_tau() const;   // scaled circumference S sqrt(b/h)
    double tau_max() const; // scaled height T sqrt(b)
    double gamma_eff() const;
};

// Quasi-periodic magnetic torus of side R with unit field; R^2 must be an
// integer multiple of 2 pi.
struct TorusModel {
    double R = 0.0;
    int flux_quanta() const; // R^2 / (2 pi); throws PhaseMismatch
};

struct FiberPoint {
    int j;
    double xi;
    double value; // h b mu_j(gamma_hb, xi)
};

std::vector<FiberPoint>
fiber_spectrum(const HalfPlaneModel& m, const std::vector<double>& xi_grid,
               int p_max, const band1d::HalfLineDiscretization& disc);

// ---- scaled strip machinery (shared by cylinder and half-plane checks) ----

// Tridiagonal of -f'' + (tau - xi)^2 f on (0, tau_max), f'(0) = g f(0),
// f(tau_max) = 0, on nt cells. The 2D strip operator uses the same tau
// coefficients, so fiber and direct spectra share their tau-grid error.
tridiag::SymTridiag strip_fiber_tridiag(double tau_max, int nt,
                                        double gamma_eff, double xi);

// Quantized-momentum fiber spectrum: union over xi_n = 2 pi n / S_tau of
// the eigenvalues below threshold (scaled units), sorted.
std::vector<double> strip_spectrum_fiber(double S_tau, double tau_max,
                                         double gamma_eff,
                                         double threshold_scaled, int nt);

// Direct 2D operator (4th-order stencils along the periodic direction,
// same tau scheme as the fiber tridiagonal).
sparse::BlockTridiag strip_operator(double S_tau, double tau_max,
                                    double gamma_eff, int ns, int nt);

std::vector<double> strip_spectrum_direct(double S_tau, double tau_max,
                                          double gamma_eff,
                                          double threshold_scaled, int ns,
                                          int nt);

struct StripComparison {
    std::vector<double> direct; // physical units (scaled by h b)
    std::vector<double> fiber;
    double max_rel_mismatch = 0.0;
};

// Lowest `count` eigenvalues both ways; throws GridTooCoarse when the two
// constructions disagree beyond rel_tol after one refinement.
StripComparison cylinder_spectrum_checked(const CylinderModel& c, int count,
                                          double rel_tol = 1e-3, int ns = 0,
                                          int nt = 0);

std::vector<double> cylinder_spectrum(const CylinderModel& c, int count,
                                      int ns = 0, int nt = 0);

// sum of (level - e)_+ ; requires computed_threshold >= level.
double positive_part_energy(const std::vector<double>& evs,
                            double computed_threshold, double level);

// E(lambda, b, S, T) = sum (h b (1 + lambda) - e_j)_+ for the cylinder.
double cylinder_energy(const CylinderModel& c, double lambda);

// ---- torus Landau levels ----

sparse::BlockTridiag torus_operator(const TorusModel& t, double spacing);

int torus_count_below(const TorusModel& t, double level, double spacing = 0.05);

struct Cluster {
    double value;
    int multiplicity;
};

// Eigenvalue clusters from inertia counts: cluster values located to
// `value_tol` by bisection, multiplicities exact.
std::vector<Cluster> torus_landau_spectrum(const TorusModel& t, int count,
                                           double spacing = 0.05,
                                           double value_tol = 0.02);

// ---- Dirichlet magnetic square ----

// (1/2pi) Card{ n >= 1 : 2n - 1 <= Lambda }
double nu_b(double Lambda);

sparse::BlockTridiag dirichlet_square_operator(double R, double spacing);

// Eigenvalue count below Lambda with a refinement audit; throws
// GridTooCoarse when the count is unstable under refinement.
int dirichlet_square_count(double Lambda, double R, double spacing = 0.05);

// ---- Lieb-Thirring ----

// Gamma(alpha+1) / (2^d pi^(d/2) Gamma(1 + alpha + d/2))
double lt_classical_constant(double alpha, int d);

struct LtCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// d = 0: boundary operator on the half-line, single negative eigenvalue
// -(gamma_+)^2; the Riesz mean is exact.
LtCheck lt_bound_check_d0(double alpha, double gamma);

// d = 1: half-strip with boundary potential -gamma(x) on y = 0, Dirichlet
// far walls at |x| = X and y = Y; truncation audited (+1/3 enlargement
// must move the Riesz mean by < 1%).
LtCheck lt_bound_check_d1(double alpha, const std::function<double(double)>& gamma,
                          double X, double Y, double spacing = 0.0625);

} // namespace robinband::model

#endif
