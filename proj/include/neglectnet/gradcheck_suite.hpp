#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "neglectnet/gradcheck.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

inline constexpr double kOpGradTolerance = 1e-3;
inline constexpr double kNetGradTolerance = 1e-2;
inline constexpr double kGradCheckEps = 1e-3;
inline constexpr double kNetGradEps = 1e-6;
inline constexpr int64_t kNetGradElements = 1000;

struct GradCheckCase {
    std::string name;
    double tolerance;
    std::function<GradCheckResult()> run;
};

struct GradCheckEntry {
    std::string name;
    double tolerance = 0;
    GradCheckResult result;
    bool passed = false;
    double seconds = 0;
    std::string error;  // set when the check threw
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    bool all_passed() const;
};

/// One case per differentiable op (tolerance 1e-3) plus end-to-end checks of
/// a depth-3 / base-4 generator in every mode and of the discriminator
/// (tolerance 1e-2).
std::vector<GradCheckCase> op_gradcheck_cases(uint64_t seed);
std::vector<GradCheckCase> network_gradcheck_cases(uint64_t seed);

/// A pointwise op whose backward rule is deliberately wrong (factor 2).
/// Exists so the harness itself can be shown to catch broken gradients.
GradCheckCase faulty_gradcheck_case(uint64_t seed);

GradCheckReport run_gradchecks(const std::vector<GradCheckCase>& cases,
                               const std::function<void(const GradCheckEntry&)>& on_entry = {});

}  // namespace neglectnet
