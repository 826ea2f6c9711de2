#include "neglectnet/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

uint8_t to_byte(Real v, bool signed_range)
{
    const double scaled = signed_range ? (static_cast<double>(v) + 1.0) * 127.5 : static_cast<double>(v) * 255.0;
    return static_cast<uint8_t>(std::clamp(std::lround(scaled), 0L, 255L));
}

Real from_byte(uint8_t b, bool signed_range)
{
    return signed_range ? static_cast<Real>(b / 127.5 - 1.0) : static_cast<Real>(b / 255.0);
}

struct FileCloser {
    void operator()(FILE* f) const { std::fclose(f); }
};

}  // namespace

Image::Image(int c, int h, int w, Real fill)
    : channels(c), height(h), width(w), data(static_cast<size_t>(c) * h * w, fill)
{
    if (c <= 0 || h <= 0 || w <= 0) throw DimensionError("image extents must be positive");
}

Tensor to_tensor(const Image& image)
{
    return Tensor::from_data({1, image.channels, image.height, image.width}, image.data);
}

Image to_image(const Tensor& t, int64_t index)
{
    if (t.rank() != 4) throw DimensionError("expected a B x C x H x W tensor, got " + shape_to_string(t.shape()));
    if (index < 0 || index >= t.dim(0)) throw ArgumentError("batch index out of range");
    Image im(static_cast<int>(t.dim(1)), static_cast<int>(t.dim(2)), static_cast<int>(t.dim(3)));
    const auto n = static_cast<int64_t>(im.data.size());
    std::copy_n(t.data().begin() + index * n, n, im.data.begin());
    return im;
}

Real quantize_signed(Real v) { return from_byte(to_byte(v, true), true); }
Real quantize_unit(Real v) { return from_byte(to_byte(v, false), false); }

void write_png(const std::string& path, const Image& image, bool signed_range)
{
    if (image.channels != 1 && image.channels != 3) throw ArgumentError("PNG output needs 1 or 3 channels");
    std::unique_ptr<FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
    if (!file) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng initialization failed");
    }
    std::vector<uint8_t> row(static_cast<size_t>(image.width) * image.channels);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to write " + path);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < image.channels; ++c)
                row[static_cast<size_t>(x) * image.channels + c] = to_byte(image.at(c, y, x), signed_range);
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image read_png(const std::string& path, bool signed_range)
{
    std::unique_ptr<FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
    if (!file) throw IoError("cannot open " + path);
    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw IoError(path + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng initialization failed");
    }
    Image image;
    std::vector<uint8_t> row;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode " + path);
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize every layout to 8-bit gray or RGB without alpha.
    const auto color = png_get_color_type(png, info);
    png_set_strip_16(png);
    png_set_packing(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    image = Image(channels, h, w);
    row.resize(png_get_rowbytes(png, info));
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c)
                image.at(c, y, x) = from_byte(row[static_cast<size_t>(x) * channels + c], signed_range);
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

}  // namespace neglectnet
