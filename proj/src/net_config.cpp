#include "neglectnet/net_config.hpp"

#include <algorithm>

namespace neglectnet::inline NEGLECTNET_PRECISION {

std::string to_string(UpsampleMode mode) { return mode == UpsampleMode::nn_conv ? "nn_conv" : "deconv"; }

UpsampleMode parse_upsample_mode(const std::string& s)
{
    if (s == "nn_conv") return UpsampleMode::nn_conv;
    if (s == "deconv") return UpsampleMode::deconv;
    throw ConfigError("upsample_mode must be nn_conv or deconv, got '" + s + "'");
}

int NetConfig::width(int layer) const
{
    if (layer < 1) throw ConfigError("layer index must be >= 1");
    // Saturate the shift before it can overflow; the cap applies anyway.
    const int shift = std::min(layer - 1, 30);
    const int64_t w = static_cast<int64_t>(base_width) << shift;
    return static_cast<int>(std::min<int64_t>(w, max_width));
}

void NetConfig::validate() const
{
    if (depth < 1 || depth > 12) throw ConfigError("depth must be in [1, 12], got " + std::to_string(depth));
    if (disc_depth < 1 || disc_depth > 12)
        throw ConfigError("disc_depth must be in [1, 12], got " + std::to_string(disc_depth));
    if (base_width < 1) throw ConfigError("base_width must be >= 1");
    if (max_width < base_width) throw ConfigError("max_width must be >= base_width");
    if (in_channels < 1) throw ConfigError("in_channels must be >= 1");
    if (image_h < 1 || image_w < 1) throw ConfigError("image dimensions must be positive");
    for (int d : {depth, disc_depth}) {
        const int f = 1 << d;
        if (image_h % f != 0 || image_w % f != 0)
            throw ConfigError("image " + std::to_string(image_h) + "x" + std::to_string(image_w) +
                              " is not divisible by 2^" + std::to_string(d));
    }
    if (!(leaky_slope >= 0)) throw ConfigError("leaky_slope must be >= 0");
    if (!(norm_eps >= 0)) throw ConfigError("norm_eps must be >= 0");
}

NetConfig NetConfig::full_scale()
{
    NetConfig c;
    c.depth = 7;
    c.base_width = 64;
    c.max_width = 512;
    c.image_h = 128;
    c.image_w = 128;
    c.disc_depth = 5;
    return c;
}

}  // namespace neglectnet
