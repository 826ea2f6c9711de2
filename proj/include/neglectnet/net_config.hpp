#pragma once

#include <string>

#include "neglectnet/common.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

enum class UpsampleMode {
    nn_conv,  // nearest-neighbour x2 followed by 3x3 stride-1 convolution
    deconv,   // 4x4 stride-2 transposed convolution
};

std::string to_string(UpsampleMode mode);
UpsampleMode parse_upsample_mode(const std::string& s);

/// Architecture of the generator and the patch discriminator.
struct NetConfig {
    int depth = 4;  // encoder stages
    int base_width = 8;
    int max_width = 512;
    int in_channels = 3;
    UpsampleMode upsample_mode = UpsampleMode::nn_conv;
    bool use_neglect_branch = true;  // false: encoder + dec-fill baseline
    int image_h = 32;
    int image_w = 32;
    Real leaky_slope = Real(0.2);
    Real norm_eps = Real(1e-5);
    int disc_depth = 3;

    /// Kernel count of encoder layer i (1-based): min(2^(i-1) * base, cap).
    int width(int layer) const;

    /// Throws ConfigError when the configuration cannot be built.
    void validate() const;

    /// 7 stages of 64..512 kernels on 128 x 128 crops, 5-stage discriminator.
    static NetConfig full_scale();
};

}  // namespace neglectnet
