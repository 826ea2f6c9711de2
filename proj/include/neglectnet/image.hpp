#pragma once

#include <string>
#include <vector>

#include "neglectnet/tensor.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// Planar float image, channel-major (c, y, x).
struct Image {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<Real> data;

    Image() = default;
    Image(int c, int h, int w, Real fill = 0);

    Real& at(int c, int y, int x) { return data[(static_cast<size_t>(c) * height + y) * width + x]; }
    Real at(int c, int y, int x) const { return data[(static_cast<size_t>(c) * height + y) * width + x]; }
    bool same_shape(const Image& o) const { return channels == o.channels && height == o.height && width == o.width; }
};

/// 1 x C x H x W tensor holding a copy of the image.
Tensor to_tensor(const Image& image);
/// Batch item `index` of a B x C x H x W tensor.
Image to_image(const Tensor& t, int64_t index = 0);

// 8-bit PNG persistence. Color images map [-1, 1] to 0..255 through
// v / 127.5 - 1; single-channel masks map [0, 1] to 0..255.
void write_png(const std::string& path, const Image& image, bool signed_range);
Image read_png(const std::string& path, bool signed_range);

Real quantize_signed(Real v);
Real quantize_unit(Real v);

}  // namespace neglectnet
