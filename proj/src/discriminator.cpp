#include "neglectnet/discriminator.hpp"

#include "init.hpp"
#include "neglectnet/ops.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

DiscriminatorParams build_discriminator(const NetConfig& config, uint64_t seed)
{
    config.validate();
    DiscriminatorParams d{config, {}};
    Rng rng(seed);
    for (int i = 1; i <= config.disc_depth; ++i) {
        const int in = i == 1 ? 2 * config.in_channels : config.width(i - 1);
        const int out = config.width(i);
        const std::string prefix = "disc." + std::to_string(i) + ".";
        d.params.add(prefix + "weight", init::gaussian({out, in, 4, 4}, rng));
        d.params.add(prefix + "gamma", init::ones(out));
        d.params.add(prefix + "beta", init::zeros(out));
    }
    d.params.add("disc.head.weight", init::gaussian({1, config.width(config.disc_depth), 1, 1}, rng));
    d.params.add("disc.head.bias", init::zeros(1));
    return d;
}

DiscriminatorOutput discriminator_forward(const DiscriminatorParams& d, const Tensor& x, const Tensor& y)
{
    const auto& c = d.config;
    if (x.shape() != y.shape())
        throw DimensionError("discriminator inputs differ: " + shape_to_string(x.shape()) + " vs " +
                             shape_to_string(y.shape()));
    if (x.rank() != 4 || x.dim(1) != c.in_channels)
        throw DimensionError("discriminator input must be B x " + std::to_string(c.in_channels) + " x H x W");
    const int64_t f = int64_t{1} << c.disc_depth;
    if (x.dim(2) % f != 0 || x.dim(3) % f != 0)
        throw ConfigError("discriminator input " + shape_to_string(x.shape()) + " is not divisible by 2^" +
                          std::to_string(c.disc_depth));

    Tensor h = concat_channels(x, y);
    for (int i = 1; i <= c.disc_depth; ++i) {
        const std::string prefix = "disc." + std::to_string(i) + ".";
        h = conv2d(h, d.params.at(prefix + "weight"), Tensor(), 2, 1);
        h = leaky_relu(instance_norm(h, d.params.at(prefix + "gamma"), d.params.at(prefix + "beta"), c.norm_eps),
                       c.leaky_slope);
    }
    DiscriminatorOutput out;
    out.patches = sigmoid(conv2d(h, d.params.at("disc.head.weight"), d.params.at("disc.head.bias"), 1, 0));
    out.score = mean_per_sample(out.patches);
    return out;
}

}  // namespace neglectnet
