#include "gradcheck_runner.hpp"

#include <cstdio>

#include "neglectnet/gradcheck_suite.hpp"

#ifdef NEGLECTNET_FLOAT64
#define RUNNER_NAME run_gradcheck_f64
#else
#define RUNNER_NAME run_gradcheck_f32
#endif

namespace neglectnet::cli {

bool RUNNER_NAME(uint64_t seed, bool inject_fault, std::ostream& out)
{
    auto cases = op_gradcheck_cases(seed);
    for (auto& c : network_gradcheck_cases(seed)) cases.push_back(std::move(c));
    if (inject_fault) cases.push_back(faulty_gradcheck_case(seed));

    const auto report = run_gradchecks(cases, [&](const GradCheckEntry& e) {
        char line[256];
        std::snprintf(line, sizeof line, "%-4s %-44s max_rel_error %.3e  tol %.0e  %.2fs", e.passed ? "PASS" : "FAIL",
                      e.name.c_str(), e.result.max_rel_error, e.tolerance, e.seconds);
        out << line;
        if (!e.error.empty()) out << "  error: " << e.error;
        out << '\n' << std::flush;
    });
    size_t passed = 0;
    for (const auto& e : report.entries) passed += e.passed;
    out << passed << '/' << report.entries.size() << " gradient checks passed\n";
    return report.all_passed();
}

}  // namespace neglectnet::cli
