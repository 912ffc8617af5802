#ifndef ROBINBAND_UTIL_HPP
#define ROBINBAND_UTIL_HPP

#include <functional>
#include <vector>

namespace robinband::util {

// Runs fn(i) for i in [0, n). Each index must write only its own output
// slot, so results are independent of the schedule.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

std::vector<double> linspace(double a, double b, int n);

// Adaptive Simpson quadrature for smooth integrands.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, int max_depth = 40);

} // namespace robinband::util

#endif
