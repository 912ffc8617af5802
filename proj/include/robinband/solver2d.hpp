#ifndef ROBINBAND_SOLVER2D_HPP
#define ROBINBAND_SOLVER2D_HPP

#include <functional>
#include <string>
#include <vector>

#include "robinband/block_hermitian.hpp"
#include "robinband/tridiag.hpp"

namespace robinband::solver2d {

enum class Domain { Disk, Square };

// One eigenproblem instance of the magnetic Robin Laplacian
// (-ih grad + A)^2 with boundary term h^(1+alpha) gamma |u|^2.
struct ProblemSpec {
    Domain domain = Domain::Disk;
    double size = 1.0; // radius or side
    double h = 0.1;
    double b = 1.0;                           // constant field strength
    std::function<double(double)> B_radial;   // optional radial profile (disk)
    double gamma = 0.0;                       // constant Robin coefficient
    std::vector<double> gamma_theta;          // sampled gamma (full 2D disk)
    double alpha = 1.0;
    double lambda = 1.0;

    // grid controls (0 = auto)
    int radial_n = 0;
    bool radial_richardson = true; // two-grid extrapolation of fiber values
    int m_lo = 0, m_hi = 0;
    long max_unknowns = 400000;

    void validate() const;
    // azimuthal gauge potential A_theta(r) = (1/r) int_0^r B rho d rho
    double a_theta(double r) const;
};

struct SpectrumResult {
    std::vector<double> eigenvalues; // sorted, everything below threshold
    double threshold = 0.0;
    double E = 0.0;
    int N = 0;
    double h = 0.0;
    double lambda = 0.0;
};

// E = sum (e_j - lambda h)_-, N = #{e_j < lambda h}. Requires
// threshold > lambda h (IncompleteSpectrum otherwise).
std::pair<double, int> energy_and_count(const std::vector<double>& evs,
                                        double threshold, double lambda,
                                        double h);

// Radial fiber tridiagonal at angular momentum m (staggered-free FEM grid
// with a node on the boundary carrying the Robin form term). Exposed for
// tests; gauge_phase adds a pure radial gauge to the link phases (changes
// nothing but the complex phases).
tridiag::SymTridiag disk_fiber_matrix(const ProblemSpec& spec, int m, int n);

// Union over angular momenta of the radial fiber spectra below
// 1.2 lambda h; the m-window is audited by extension.
SpectrumResult disk_fiber_solve(const ProblemSpec& spec);

// Full polar-grid 2D discretization of the disk (oracle for the fiber
// union, and the solver for boundary-sampled gamma).
sparse::BlockTridiag polar_disk_operator(const ProblemSpec& spec, int nr,
                                         int ntheta, bool graded = false);
SpectrumResult polar_disk_solve(const ProblemSpec& spec, int nr, int ntheta);

// Neumann magnetic square in the Landau gauge (Peierls links). The
// optional gauge_shift adds grad(c x1), which must leave the spectrum
// bitwise stable up to solver tolerance.
sparse::BlockTridiag square_operator(const ProblemSpec& spec, int n,
                                     double gauge_shift = 0.0);
SpectrumResult square_solve(const ProblemSpec& spec);

// Eigenvalue count below `level` (absolute energy) by inertia only;
// cheap enough for the large-square counting studies.
int square_count_below(const ProblemSpec& spec, double level);

struct ConvergenceRow {
    double h = 0.0;
    double E = 0.0;
    int N = 0;
    double scaled_E = 0.0; // h^{-1/2} E
    double scaled_N = 0.0; // h^{1/2} N (boundary-band count scaling)
    double err_E = 0.0;    // relative error vs limit
    double err_N = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double limit_E = 0.0;
    double limit_N = 0.0;
    double extrapolated_E = 0.0; // Richardson on the last three h
    bool partial = false;
    std::string note;
};

ConvergenceReport convergence_study(const ProblemSpec& base,
                                    const std::vector<double>& h_list,
                                    double limit_E, double limit_N);

// Bottom of the discretized form for rough boundary gamma; stability
// under one grid refinement is the semi-boundedness witness.
struct ProbeResult {
    double bottom = 0.0;
    double bottom_refined = 0.0;
    double rel_change = 0.0;
};
ProbeResult form_lower_bound_probe(const ProblemSpec& spec, int nr = 0,
                                   int ntheta = 0);

} // namespace robinband::solver2d

#endif
