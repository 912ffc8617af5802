// Acceptance suite runner: one pass/fail line per criterion.
#include <cstdio>
#include <cstring>
#include <iostream>

#include "robinband/harness.hpp"

int main(int argc, char** argv) {
    using namespace robinband::harness;
    Budget budget = Budget::Quick;
    std::string out_dir = "acceptance_out";
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--budget") == 0 && i + 1 < argc)
            budget = std::strcmp(argv[i + 1], "full") == 0 ? Budget::Full
                                                           : Budget::Quick;
        if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc)
            out_dir = argv[i + 1];
    }
    const auto rep = validate_all(budget, out_dir, 2);
    std::cout << rep.report.summary();
    return rep.ok ? 0 : 1;
}
