#include "neglectnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

double evaluate(const ScalarFunction& f, const std::vector<Tensor>& inputs)
{
    NoGradGuard no_grad;
    const Tensor y = f(inputs);
    const double v = static_cast<double>(y.item());
    if (!std::isfinite(v)) throw NumericError("grad_check: function value is not finite");
    return v;
}

}  // namespace

GradCheckResult grad_check_detailed(const ScalarFunction& f, const std::vector<Tensor>& inputs, double eps,
                                    int64_t max_elements_per_input)
{
    if (!(eps > 0)) throw ArgumentError("grad_check: eps must be positive");
    for (auto t : inputs) {
        t.set_requires_grad(true);
        t.zero_grad();
    }
    {
        const Tensor y = f(inputs);
        if (!std::isfinite(static_cast<double>(y.item()))) throw NumericError("grad_check: function value is not finite");
        y.backward();
    }

    GradCheckResult result;
    for (size_t k = 0; k < inputs.size(); ++k) {
        Tensor t = inputs[k];
        const std::vector<Real> analytic(t.grad().begin(), t.grad().end());
        const int64_t n = t.numel();
        const int64_t stride =
            (max_elements_per_input > 0 && n > max_elements_per_input) ? (n + max_elements_per_input - 1) / max_elements_per_input : 1;
        for (int64_t i = 0; i < n; i += stride) {
            Real& slot = t.mutable_data()[static_cast<size_t>(i)];
            const Real original = slot;
            const Real up = static_cast<Real>(original + eps);
            const Real down = static_cast<Real>(original - eps);
            slot = up;
            const double fp = evaluate(f, inputs);
            slot = down;
            const double fm = evaluate(f, inputs);
            slot = original;

            // Divide by the step actually representable in Real.
            const double numeric = (fp - fm) / (static_cast<double>(up) - static_cast<double>(down));
            const double a = analytic[static_cast<size_t>(i)];
            if (!std::isfinite(a)) throw NumericError("grad_check: analytic gradient is not finite");
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            const double rel = std::abs(a - numeric) / denom;
            ++result.elements_checked;
            if (rel >= result.max_rel_error) {
                result.max_rel_error = rel;
                result.input_index = k;
                result.element = i;
                result.analytic = a;
                result.numeric = numeric;
            }
        }
    }
    return result;
}

double grad_check(const ScalarFunction& f, const std::vector<Tensor>& inputs, double eps)
{
    return grad_check_detailed(f, inputs, eps).max_rel_error;
}

}  // namespace neglectnet
