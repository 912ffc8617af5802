#include "robinband/harness.hpp"

#include "robinband/errors.hpp"

// The experiment implementations live in harness_experiments.cpp and
// harness_validate.cpp; this file only holds the shared plumbing.

namespace robinband::harness {

RunConfig RunConfig::from_config(const Config& c) {
    RunConfig rc;
    rc.kind = c.get("experiment.kind");
    static const char* kinds[] = {"band",         "limits",    "models",
                                  "disk-converge", "square-count", "lt-check",
                                  "validate"};
    bool known = false;
    for (const char* k : kinds) known = known || rc.kind == k;
    if (!known) throw ConfigInvalid("unknown experiment kind '" + rc.kind + "'");
    rc.out_dir = c.get_or("experiment.out", ".");
    const std::string budget = c.get_or("experiment.budget", "quick");
    if (budget == "quick")
        rc.budget = Budget::Quick;
    else if (budget == "full")
        rc.budget = Budget::Full;
    else
        throw ConfigInvalid("budget must be quick or full");
    rc.threads = c.get_int_or("experiment.threads", 1);
    if (rc.threads < 1) throw ConfigInvalid("threads must be positive");
    rc.raw = c;
    return rc;
}

} // namespace robinband::harness
