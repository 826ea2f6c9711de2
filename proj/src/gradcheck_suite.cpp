#include "neglectnet/gradcheck_suite.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>

#include "neglectnet/discriminator.hpp"
#include "neglectnet/generator.hpp"
#include "neglectnet/ops.hpp"
#include "neglectnet/rng.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

Tensor randn(const Shape& shape, Rng& rng, double scale = 1.0)
{
    std::vector<Real> d(static_cast<size_t>(shape_numel(shape)));
    for (auto& v : d) v = static_cast<Real>(rng.normal() * scale);
    return Tensor::from_data(shape, std::move(d));
}

// Values bounded away from zero so finite differences never straddle a kink.
Tensor away_from_zero(const Shape& shape, Rng& rng, double margin = 0.1)
{
    std::vector<Real> d(static_cast<size_t>(shape_numel(shape)));
    for (auto& v : d) {
        const double r = rng.normal();
        v = static_cast<Real>(r >= 0 ? r + margin : r - margin);
    }
    return Tensor::from_data(shape, std::move(d));
}

Tensor uniform(const Shape& shape, Rng& rng, double lo, double hi)
{
    std::vector<Real> d(static_cast<size_t>(shape_numel(shape)));
    for (auto& v : d) v = static_cast<Real>(rng.uniform(lo, hi));
    return Tensor::from_data(shape, std::move(d));
}

// Per-input element budget: at most about kNetGradElements perturbed entries in total.
int64_t per_input_budget(size_t n_inputs)
{
    return std::max<int64_t>(1, kNetGradElements / static_cast<int64_t>(n_inputs));
}

GradCheckCase op_case(std::string name, ScalarFunction f, std::vector<Tensor> inputs)
{
    return {std::move(name), kOpGradTolerance,
            [f = std::move(f), inputs = std::move(inputs)] { return grad_check_detailed(f, inputs, kGradCheckEps); }};
}

NetConfig tiny_config(UpsampleMode mode, bool neglect)
{
    NetConfig c;
    c.depth = 3;
    c.base_width = 4;
    c.max_width = 16;
    c.image_h = 16;
    c.image_w = 16;
    c.disc_depth = 3;
    c.upsample_mode = mode;
    c.use_neglect_branch = neglect;
    return c;
}

GradCheckCase generator_case(std::string name, NetConfig config, uint64_t seed)
{
    return {std::move(name), kNetGradTolerance, [config, seed] {
                auto g = build_generator(config, seed);
                Rng rng(derive_seed(seed, 7));
                const Tensor x = uniform({1, 3, config.image_h, config.image_w}, rng, -1, 1);
                std::vector<Tensor> inputs;
                for (const auto& [name, t] : g.params.items()) inputs.push_back(t);
                inputs.push_back(x);
                ScalarFunction f = [g, n = g.params.size()](const std::vector<Tensor>& in) {
                    auto out = generator_forward(g, in[n]);
                    Tensor loss = mean(out.y_p);
                    if (out.z_p.defined()) loss = add(loss, mean(out.z_p));
                    return loss;
                };
                return grad_check_detailed(f, inputs, kNetGradEps, per_input_budget(inputs.size()));
            }};
}

}  // namespace

bool GradCheckReport::all_passed() const
{
    for (const auto& e : entries)
        if (!e.passed) return false;
    return !entries.empty();
}

std::vector<GradCheckCase> op_gradcheck_cases(uint64_t seed)
{
    Rng rng(seed);
    std::vector<GradCheckCase> cases;

    cases.push_back(op_case(
        "conv2d 3x3 s1 p1",
        [](const std::vector<Tensor>& in) { return mean(sigmoid(conv2d(in[0], in[1], in[2], 1, 1))); },
        {randn({1, 2, 6, 6}, rng), randn({3, 2, 3, 3}, rng, 0.5), randn({3}, rng, 0.5)}));
    cases.push_back(op_case(
        "conv2d 4x4 s2 p1",
        [](const std::vector<Tensor>& in) { return mean(sigmoid(conv2d(in[0], in[1], in[2], 2, 1))); },
        {randn({2, 2, 6, 6}, rng), randn({3, 2, 4, 4}, rng, 0.5), randn({3}, rng, 0.5)}));
    cases.push_back(op_case(
        "conv_transpose2d 4x4 s2 p1",
        [](const std::vector<Tensor>& in) { return mean(sigmoid(conv_transpose2d(in[0], in[1], in[2], 2, 1))); },
        {randn({2, 2, 3, 3}, rng), randn({2, 3, 4, 4}, rng, 0.5), randn({3}, rng, 0.5)}));
    cases.push_back(op_case(
        "conv_transpose2d 3x3 s1 p0",
        [](const std::vector<Tensor>& in) { return mean(sigmoid(conv_transpose2d(in[0], in[1], in[2], 1, 0))); },
        {randn({1, 3, 3, 4}, rng), randn({3, 2, 3, 3}, rng, 0.5), randn({2}, rng, 0.5)}));
    {
        const Tensor weights = uniform({1, 2, 6, 6}, rng, 0.5, 1.5);
        cases.push_back(op_case(
            "upsample_nearest x2",
            [weights](const std::vector<Tensor>& in) { return mean(mul(sigmoid(upsample_nearest(in[0], 2)), weights)); },
            {randn({1, 2, 3, 3}, rng)}));
    }
    cases.push_back(op_case(
        "instance_norm",
        [](const std::vector<Tensor>& in) { return mean(sigmoid(instance_norm(in[0], in[1], in[2], Real(1e-5)))); },
        {randn({2, 3, 4, 4}, rng), uniform({3}, rng, 0.5, 1.5), randn({3}, rng, 0.5)}));
    cases.push_back(op_case(
        "instance_norm composite",
        [](const std::vector<Tensor>& in) {
            auto h = conv2d(in[0], in[1], Tensor(), 2, 1);
            return mean(sigmoid(instance_norm(h, in[2], in[3], Real(1e-5))));
        },
        {randn({1, 2, 8, 8}, rng), randn({3, 2, 4, 4}, rng, 0.5), uniform({3}, rng, 0.5, 1.5), randn({3}, rng, 0.5)}));
    cases.push_back(op_case(
        "leaky_relu", [](const std::vector<Tensor>& in) { return mean(sigmoid(leaky_relu(in[0], Real(0.2)))); },
        {away_from_zero({1, 2, 4, 4}, rng)}));
    cases.push_back(op_case("relu", [](const std::vector<Tensor>& in) { return mean(sigmoid(relu(in[0]))); },
                            {away_from_zero({1, 2, 4, 4}, rng)}));
    cases.push_back(op_case("sigmoid", [](const std::vector<Tensor>& in) { return mean(sigmoid(in[0])); },
                            {randn({1, 2, 4, 4}, rng)}));
    cases.push_back(op_case("tanh", [](const std::vector<Tensor>& in) { return mean(tanh(in[0])); },
                            {randn({1, 2, 4, 4}, rng)}));
    cases.push_back(op_case(
        "concat_channels",
        [](const std::vector<Tensor>& in) {
            return mean(sigmoid(conv2d(concat_channels(in[0], in[1]), in[2], Tensor(), 1, 0)));
        },
        {randn({1, 1, 3, 3}, rng), randn({1, 2, 3, 3}, rng), randn({2, 3, 1, 1}, rng)}));
    cases.push_back(op_case(
        "slice_channels", [](const std::vector<Tensor>& in) { return mean(sigmoid(slice_channels(in[0], 1, 2))); },
        {randn({2, 4, 2, 2}, rng)}));
    cases.push_back(op_case(
        "mul broadcast", [](const std::vector<Tensor>& in) { return mean(sigmoid(mul(sigmoid(in[0]), in[1]))); },
        {randn({2, 1, 3, 3}, rng), randn({2, 4, 3, 3}, rng)}));
    cases.push_back(op_case("add", [](const std::vector<Tensor>& in) { return mean(sigmoid(add(in[0], in[1]))); },
                            {randn({1, 2, 3, 3}, rng), randn({1, 2, 3, 3}, rng)}));
    cases.push_back(op_case("sub", [](const std::vector<Tensor>& in) { return mean(sigmoid(sub(in[0], in[1]))); },
                            {randn({1, 2, 3, 3}, rng), randn({1, 1, 3, 3}, rng)}));
    cases.push_back(op_case("neg", [](const std::vector<Tensor>& in) { return mean(sigmoid(neg(in[0]))); },
                            {randn({1, 2, 3, 3}, rng)}));
    cases.push_back(op_case(
        "affine", [](const std::vector<Tensor>& in) { return mean(sigmoid(affine(in[0], Real(-1.5), Real(0.5)))); },
        {randn({6}, rng)}));
    cases.push_back(op_case("log", [](const std::vector<Tensor>& in) { return mean(log(in[0])); },
                            {uniform({2, 5}, rng, 0.2, 2.0)}));
    cases.push_back(op_case("sum", [](const std::vector<Tensor>& in) { return sum(sigmoid(in[0])); },
                            {randn({2, 3}, rng)}));
    cases.push_back(op_case("mean", [](const std::vector<Tensor>& in) { return mean(in[0]); },
                            {randn({3, 4}, rng)}));
    cases.push_back(op_case(
        "mean_per_sample", [](const std::vector<Tensor>& in) { return mean(log(mean_per_sample(sigmoid(in[0])))); },
        {randn({3, 1, 2, 2}, rng)}));
    {
        // Pairs separated by at least 0.1 keep |a - b| away from its kink.
        const Tensor a = randn({2, 3, 3}, rng);
        const Tensor offset = away_from_zero({2, 3, 3}, rng);
        const Tensor b = add(a, offset).detach();
        cases.push_back(op_case("l1_distance", [](const std::vector<Tensor>& in) { return l1_distance(in[0], in[1]); },
                                {a, b}));
    }
    return cases;
}

std::vector<GradCheckCase> network_gradcheck_cases(uint64_t seed)
{
    std::vector<GradCheckCase> cases;
    cases.push_back(generator_case("generator full nn_conv (d3 b4 16x16)", tiny_config(UpsampleMode::nn_conv, true),
                                   derive_seed(seed, 1)));
    cases.push_back(generator_case("generator full deconv (d3 b4 16x16)", tiny_config(UpsampleMode::deconv, true),
                                   derive_seed(seed, 2)));
    cases.push_back(generator_case("generator baseline (d3 b4 16x16)", tiny_config(UpsampleMode::nn_conv, false),
                                   derive_seed(seed, 3)));
    cases.push_back({"discriminator (d3 b4 16x16)", kNetGradTolerance, [seed] {
                         const NetConfig c = tiny_config(UpsampleMode::nn_conv, true);
                         auto d = build_discriminator(c, derive_seed(seed, 4));
                         Rng rng(derive_seed(seed, 5));
                         std::vector<Tensor> inputs;
                         for (const auto& [name, t] : d.params.items()) inputs.push_back(t);
                         inputs.push_back(uniform({2, 3, 16, 16}, rng, -1, 1));
                         inputs.push_back(uniform({2, 3, 16, 16}, rng, -1, 1));
                         const size_t n = d.params.size();
                         ScalarFunction f = [d, n](const std::vector<Tensor>& in) {
                             return mean(discriminator_forward(d, in[n], in[n + 1]).score);
                         };
                         return grad_check_detailed(f, inputs, kNetGradEps, per_input_budget(inputs.size()));
                     }});
    return cases;
}

GradCheckCase faulty_gradcheck_case(uint64_t seed)
{
    Rng rng(seed);
    const Tensor x = randn({1, 1, 3, 3}, rng);
    ScalarFunction f = [](const std::vector<Tensor>& in) {
        const Tensor& a = in[0];
        std::vector<Real> out(a.data().begin(), a.data().end());
        for (auto& v : out) v = v * v;
        // d(x^2)/dx is 2x; this rule reports 4x.
        auto squared = detail::make_result("faulty_square", a.shape(), std::move(out), {a}, [a](const TensorImpl& o) {
            if (!a.requires_grad()) return;
            auto& g = detail::grad_buffer(a);
            for (size_t i = 0; i < g.size(); ++i) g[i] += o.grad[i] * Real(4) * a[static_cast<int64_t>(i)];
        });
        return mean(squared);
    };
    return op_case("faulty_square (injected wrong backward)", std::move(f), {x});
}

GradCheckReport run_gradchecks(const std::vector<GradCheckCase>& cases,
                               const std::function<void(const GradCheckEntry&)>& on_entry)
{
    GradCheckReport report;
    for (const auto& c : cases) {
        GradCheckEntry e;
        e.name = c.name;
        e.tolerance = c.tolerance;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.result = c.run();
            e.passed = std::isfinite(e.result.max_rel_error) && e.result.max_rel_error < c.tolerance;
        } catch (const std::exception& ex) {
            e.error = ex.what();
            e.passed = false;
        }
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_entry) on_entry(e);
        report.entries.push_back(std::move(e));
    }
    return report;
}

}  // namespace neglectnet
