#pragma once

#include <functional>
#include <string>
#include <vector>

#include "neglectnet/tensor.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

using ScalarFunction = std::function<Tensor(const std::vector<Tensor>&)>;

struct GradCheckResult {
    double max_rel_error = 0.0;
    // Location of the worst element.
    size_t input_index = 0;
    int64_t element = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    int64_t elements_checked = 0;
};

/// Compares reverse-mode gradients of a scalar function against central
/// differences (f(x+eps) - f(x-eps)) / (2 eps). The relative error of each
/// element uses max(|analytic|, |numeric|, 1e-8) as denominator.
///
/// `max_elements_per_input` > 0 checks an evenly strided subset of each input.
/// Inputs are restored to their original values before returning.
GradCheckResult grad_check_detailed(const ScalarFunction& f, const std::vector<Tensor>& inputs, double eps,
                                    int64_t max_elements_per_input = 0);

double grad_check(const ScalarFunction& f, const std::vector<Tensor>& inputs, double eps);

}  // namespace neglectnet
