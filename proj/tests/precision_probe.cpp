#include "precision_probe.hpp"

#include "neglectnet/generator.hpp"
#include "neglectnet/ops.hpp"
#include "neglectnet/rng.hpp"

#ifdef NEGLECTNET_FLOAT64
#define PROBE_NAME generator_grads_f64
#else
#define PROBE_NAME generator_grads_f32
#endif

namespace probe {

std::vector<double> PROBE_NAME(uint64_t seed, bool deconv)
{
    using namespace neglectnet;
    NetConfig c;
    c.depth = 3;
    c.base_width = 4;
    c.max_width = 16;
    c.image_h = 16;
    c.image_w = 16;
    c.upsample_mode = deconv ? UpsampleMode::deconv : UpsampleMode::nn_conv;
    auto g = build_generator(c, seed);

    Rng rng(derive_seed(seed, 7));
    std::vector<Real> xs(3 * 16 * 16);
    for (auto& v : xs) v = static_cast<Real>(rng.uniform(-1, 1));
    auto x = Tensor::from_data({1, 3, 16, 16}, std::move(xs), true);

    auto out = generator_forward(g, x);
    add(mean(out.y_p), mean(out.z_p)).backward();

    std::vector<double> grads;
    for (const auto& [name, t] : g.params.items()) grads.insert(grads.end(), t.grad().begin(), t.grad().end());
    grads.insert(grads.end(), x.grad().begin(), x.grad().end());
    return grads;
}

}  // namespace probe
