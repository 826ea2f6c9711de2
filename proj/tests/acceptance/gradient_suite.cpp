#include "gradient_suite.hpp"

#include <chrono>

#include "neglectnet/gradcheck_suite.hpp"

namespace acceptance {
namespace {

std::vector<SuiteCase> run(const std::vector<neglectnet::GradCheckCase>& cases)
{
    std::vector<SuiteCase> out;
    for (const auto& e : neglectnet::run_gradchecks(cases).entries)
        out.push_back({e.name, e.result.max_rel_error, e.tolerance, e.passed});
    return out;
}

}  // namespace

SuiteResult run_gradient_suite(uint64_t seed)
{
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    r.ops = run(neglectnet::op_gradcheck_cases(seed));
    r.networks = run(neglectnet::network_gradcheck_cases(seed));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto fault = run({neglectnet::faulty_gradcheck_case(seed)});
    r.fault_detected = !fault.front().passed;
    return r;
}

}  // namespace acceptance
