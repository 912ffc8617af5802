#ifndef ROBINBAND_BAND1D_HPP
#define ROBINBAND_BAND1D_HPP

#include <string>
#include <vector>

#include "robinband/errors.hpp"
#include "robinband/tridiag.hpp"

namespace robinband::band1d {

// Parameters of the half-line shifted harmonic oscillator
//   -u'' + (t - xi)^2 u   on (0, inf),   u'(0) = gamma * u(0).
// Its eigenvalues mu_j(gamma, xi) are the band functions.
struct RobinOscillatorParams {
    double gamma = 0.0;
    double xi = 0.0;
};

enum class Scheme { FiniteDifferenceGhost, Shooting };

// Truncation of the half-line to [0, L] with a Dirichlet wall at L and a
// uniform grid of n cells. Defaults resolve bands j <= ~8 to ~1e-8 after
// two-grid extrapolation.
struct HalfLineDiscretization {
    double L = 16.0;
    int n = 800;
    Scheme scheme = Scheme::FiniteDifferenceGhost;
    bool richardson = true; // two-grid eigenvalue extrapolation (FD scheme)

    double spacing() const { return L / n; }

    // L = |xi| + 12, spacing as requested.
    static HalfLineDiscretization for_xi(double xi_abs_max, double spacing = 0.02);

    // Enforces L >= |xi| + 10, n >= 200, spacing <= 0.05.
    void validate(double xi) const;
};

// j-th band function value (j >= 1), using disc.scheme.
double mu(int j, const RobinOscillatorParams& p, const HalfLineDiscretization& disc);

double mu_fd(int j, const RobinOscillatorParams& p, const HalfLineDiscretization& disc);
double mu_shooting(int j, const RobinOscillatorParams& p, const HalfLineDiscretization& disc);

// Runs both schemes; throws UnresolvedBand if they disagree beyond tol.
double mu_cross_validated(int j, const RobinOscillatorParams& p,
                          const HalfLineDiscretization& disc, double tol = 1e-6);

// Normalized eigenfunction sampled on the grid nodes t_i = i*L/n, i=0..n-1.
struct Eigenfunction {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> w; // quadrature weights, sum w_i u_i^2 = 1
    double mu = 0.0;

    double value0() const { return u.front(); }
    // integral of u^2 over t >= t_from
    double tail_mass(double t_from) const;
    // residual of the discrete eigenvalue equation, relative to mu scale
    double discrete_residual = 0.0;
    // centroid integral m1 = int t u^2 dt (used for d mu / d xi)
    double centroid = 0.0;
};

Eigenfunction eigenfunction(int j, const RobinOscillatorParams& p,
                            const HalfLineDiscretization& disc);

// u(0)^2 of the normalized eigenfunction (two-grid extrapolated). Asserts
// the explicit a-priori bound u(0)^2 <= 4 mu + 8 gamma_-^2 + 2.
double boundary_value_sq(int j, const RobinOscillatorParams& p,
                         const HalfLineDiscretization& disc);

struct ThetaResult {
    double theta;  // inf_xi mu_j(gamma, xi)
    double xi_min; // argmin
};

// Band minimum: coarse scan + golden section bracket, polished by bisection
// on the Feynman-Hellmann derivative d mu/d xi = -2 (m1 - xi).
ThetaResult theta(double gamma, int j, const HalfLineDiscretization& disc);

// Numeric estimate of lim_{xi -> +inf} mu_j(gamma, xi) (= 2j - 1 up to a
// Gaussian-small defect; evaluated at a large xi).
double xi_inf_limit(int j, double gamma, const HalfLineDiscretization& disc);

struct XiRoots {
    double lo, hi; // sublevel set {mu_j < b0} = (lo, hi)
};

// The two solutions of mu_j(gamma, xi) = b0 flanking the band minimum.
XiRoots xi_roots(int j, double gamma, double b0, const HalfLineDiscretization& disc);

// Dense table of band values over (j, gamma, xi) with bilinear interpolation.
struct BandTable {
    std::vector<double> gamma_grid;
    std::vector<double> xi_grid;
    int p_max = 0;
    HalfLineDiscretization disc;
    std::vector<double> values; // [j-1][ig][ix]

    double at(int j, int ig, int ix) const;
    double interp(int j, double gamma, double xi) const;
    bool covers(double gamma, double xi) const;

    // Throws Error when a monotonicity invariant fails.
    void audit(double tol = 1e-9) const;

    void save(const std::string& path) const;
    static BandTable load(const std::string& path);
};

BandTable band_table(const std::vector<double>& gamma_grid,
                     const std::vector<double>& xi_grid, int p_max,
                     const HalfLineDiscretization& disc, int threads = 1);

} // namespace robinband::band1d

#endif
