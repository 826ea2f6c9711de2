#pragma once

#include <cstdint>

#include "neglectnet/net_config.hpp"
#include "neglectnet/params.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// Conditional patch discriminator: disc_depth encoder-style stages over the
/// 6-channel (x, y) concatenation, a 1x1 conv head and a sigmoid per patch.
///
/// Parameters: disc.i.{weight,gamma,beta}, disc.head.{weight,bias}.
struct DiscriminatorParams {
    NetConfig config;
    ParamStore params;
};

DiscriminatorParams build_discriminator(const NetConfig& config, uint64_t seed);

struct DiscriminatorOutput {
    Tensor patches;  // B x 1 x (H / 2^d) x (W / 2^d), each in (0, 1)
    Tensor score;    // {B}: mean over patches
};

DiscriminatorOutput discriminator_forward(const DiscriminatorParams& d, const Tensor& x, const Tensor& y);

}  // namespace neglectnet
