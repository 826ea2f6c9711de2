#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace acceptance {

struct SuiteCase {
    std::string name;
    double max_rel_error = 0;
    double tolerance = 0;
    bool passed = false;
};

struct SuiteResult {
    std::vector<SuiteCase> ops;
    std::vector<SuiteCase> networks;
    bool fault_detected = false;  // the deliberately wrong backward rule was reported
    double seconds = 0;
};

/// Op and end-to-end finite-difference checks on the 64-bit core.
SuiteResult run_gradient_suite(uint64_t seed);

}  // namespace acceptance
