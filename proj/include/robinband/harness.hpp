#ifndef ROBINBAND_HARNESS_HPP
#define ROBINBAND_HARNESS_HPP

#include <string>

#include "robinband/config.hpp"
#include "robinband/report.hpp"

namespace robinband::harness {

enum class Budget { Quick, Full };

struct RunConfig {
    std::string kind; // band | limits | models | disk-converge |
                      // square-count | lt-check | validate
    std::string out_dir = ".";
    Budget budget = Budget::Quick;
    int threads = 1;
    Config raw;

    static RunConfig from_config(const Config& c);
};

struct RunReport {
    Report report;
    bool ok = false;
};

RunReport run_experiment(const RunConfig& config);

// The acceptance suite. Quick covers every criterion that fits a
// five-minute budget; Full adds the semiclassical convergence studies.
RunReport validate_all(Budget budget, const std::string& out_dir = ".",
                       int threads = 1);

} // namespace robinband::harness

#endif
