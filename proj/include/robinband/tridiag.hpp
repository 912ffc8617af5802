#ifndef ROBINBAND_TRIDIAG_HPP
#define ROBINBAND_TRIDIAG_HPP

#include <utility>
#include <vector>

namespace robinband::tridiag {

// Real symmetric tridiagonal matrix. `off` holds the n-1 sub/super entries.
// Hermitian tridiagonal problems reduce to this form because Sturm counts
// and eigenvalues depend on the off-diagonal entries only through |b_i|^2;
// use off = |b_i| in that case.
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;

    int n() const { return static_cast<int>(diag.size()); }
};

// Gershgorin interval containing the whole spectrum.
std::pair<double, double> gershgorin_bounds(const SymTridiag& m);

// Number of eigenvalues strictly below x (Sturm / LDL sign count).
int count_below(const SymTridiag& m, double x);

// j-th smallest eigenvalue, j >= 1, by bisection on the Sturm count.
double eigenvalue(const SymTridiag& m, int j, double abs_tol = 1e-12);

// All eigenvalues strictly below `threshold`, sorted ascending.
std::vector<double> eigenvalues_below(const SymTridiag& m, double threshold,
                                      double abs_tol = 1e-12);

// Eigenvector for an eigenvalue estimate `lambda` by inverse iteration.
// Returned vector has unit Euclidean norm and a nonnegative first
// significant component.
std::vector<double> eigenvector(const SymTridiag& m, double lambda);

} // namespace robinband::tridiag

#endif
