#include "neglectnet/data_synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "neglectnet/ops.hpp"
#include "neglectnet/parallel.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace fs = std::filesystem;
namespace {

using Color = std::array<double, 3>;

Color random_color(Rng& rng, double lo = -1, double hi = 1)
{
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

size_t pick(const std::array<double, 3>& weights, Rng& rng)
{
    const double total = weights[0] + weights[1] + weights[2];
    double r = rng.uniform() * total;
    for (size_t i = 0; i < 2; ++i) {
        if (r < weights[i]) return i;
        r -= weights[i];
    }
    return 2;
}

Real clamp_signed(double v) { return static_cast<Real>(std::clamp(v, -1.0, 1.0)); }

double smoothstep(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3 - 2 * t);
}

void fill_gradient(Image& im, Rng& rng)
{
    const Color c0 = random_color(rng), c1 = random_color(rng);
    const double theta = rng.uniform(0, 2 * std::numbers::pi);
    const double dx = std::cos(theta), dy = std::sin(theta);
    const double reach = 0.5 * (std::abs(dx) + std::abs(dy));
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            const double u = (x + 0.5) / im.width - 0.5, v = (y + 0.5) / im.height - 0.5;
            const double t = smoothstep(0.5 + (u * dx + v * dy) / (2 * reach));
            for (int c = 0; c < 3; ++c) im.at(c, y, x) = clamp_signed(c0[c] + (c1[c] - c0[c]) * t);
        }
}

// Multi-octave bilinear value noise in roughly [-1, 1].
std::vector<double> value_noise(int h, int w, Rng& rng)
{
    std::vector<double> out(static_cast<size_t>(h) * w, 0.0);
    const int octaves = rng.uniform_int(3, 5);
    int cells = rng.uniform_int(2, 4);
    double amp = 0.5;
    for (int o = 0; o < octaves; ++o, cells *= 2, amp *= 0.5) {
        const int n = cells + 1;
        std::vector<double> lattice(static_cast<size_t>(n) * n);
        for (auto& v : lattice) v = rng.uniform(-1, 1);
        for (int y = 0; y < h; ++y) {
            const double fy = (y + 0.5) / h * cells;
            const int y0 = std::min(static_cast<int>(fy), cells - 1);
            const double ty = smoothstep(fy - y0);
            for (int x = 0; x < w; ++x) {
                const double fx = (x + 0.5) / w * cells;
                const int x0 = std::min(static_cast<int>(fx), cells - 1);
                const double tx = smoothstep(fx - x0);
                const auto L = [&](int yy, int xx) { return lattice[static_cast<size_t>(yy) * n + xx]; };
                const double top = L(y0, x0) + (L(y0, x0 + 1) - L(y0, x0)) * tx;
                const double bot = L(y0 + 1, x0) + (L(y0 + 1, x0 + 1) - L(y0 + 1, x0)) * tx;
                out[static_cast<size_t>(y) * w + x] += amp * 2 * (top + (bot - top) * ty);
            }
        }
    }
    return out;
}

void fill_noise(Image& im, Rng& rng)
{
    const Color base = random_color(rng, -0.6, 0.6), t1 = random_color(rng, -0.6, 0.6), t2 = random_color(rng, -0.6, 0.6);
    const auto n1 = value_noise(im.height, im.width, rng);
    const auto n2 = value_noise(im.height, im.width, rng);
    for (int y = 0; y < im.height; ++y)
        for (int x = 0; x < im.width; ++x) {
            const size_t i = static_cast<size_t>(y) * im.width + x;
            for (int c = 0; c < 3; ++c) im.at(c, y, x) = clamp_signed(base[c] + t1[c] * n1[i] + t2[c] * n2[i]);
        }
}

void fill_shapes(Image& im, Rng& rng)
{
    const Color base = random_color(rng);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < im.height * im.width; ++i) im.data[static_cast<size_t>(c) * im.height * im.width + i] = static_cast<Real>(base[c]);
    const int count = rng.uniform_int(3, 8);
    for (int k = 0; k < count; ++k) {
        const Color col = random_color(rng);
        const bool ellipse = rng.bernoulli(0.5);
        const double cx = rng.uniform(0, im.width), cy = rng.uniform(0, im.height);
        const double rx = rng.uniform(0.05, 0.3) * im.width, ry = rng.uniform(0.05, 0.3) * im.height;
        for (int y = 0; y < im.height; ++y)
            for (int x = 0; x < im.width; ++x) {
                const double u = (x + 0.5 - cx) / rx, v = (y + 0.5 - cy) / ry;
                const bool inside = ellipse ? u * u + v * v <= 1 : std::abs(u) <= 1 && std::abs(v) <= 1;
                if (inside)
                    for (int c = 0; c < 3; ++c) im.at(c, y, x) = static_cast<Real>(col[c]);
            }
    }
}

double pixel_std(const Image& im)
{
    double s = 0, s2 = 0;
    for (Real v : im.data) {
        s += v;
        s2 += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(im.data.size());
    return std::sqrt(std::max(0.0, s2 / n - (s / n) * (s / n)));
}

// A shape in its own unit frame: an inside test plus its bounding box.
struct ShapeSpec {
    std::function<bool(double, double)> inside;
    double u0, v0, u1, v1;
};

double segment_distance(double px, double py, double ax, double ay, double bx, double by)
{
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    const double t = len2 > 0 ? std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0) : 0.0;
    return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

ShapeSpec glyph_strokes(Rng& rng)
{
    using Polyline = std::vector<std::array<double, 2>>;
    const double thickness = rng.uniform(0.05, 0.12);
    std::vector<Polyline> strokes(static_cast<size_t>(rng.uniform_int(2, 4)));
    double u0 = 1e9, v0 = 1e9, u1 = -1e9, v1 = -1e9;
    for (auto& s : strokes) {
        s.resize(static_cast<size_t>(rng.uniform_int(2, 4)));
        for (auto& p : s) {
            p = {rng.uniform(), rng.uniform()};
            u0 = std::min(u0, p[0] - thickness);
            u1 = std::max(u1, p[0] + thickness);
            v0 = std::min(v0, p[1] - thickness);
            v1 = std::max(v1, p[1] + thickness);
        }
    }
    auto inside = [strokes, thickness](double u, double v) {
        for (const auto& s : strokes)
            for (size_t i = 0; i + 1 < s.size(); ++i)
                if (segment_distance(u, v, s[i][0], s[i][1], s[i + 1][0], s[i + 1][1]) <= thickness) return true;
        return false;
    };
    return {inside, u0, v0, u1, v1};
}

ShapeSpec polygon(Rng& rng)
{
    const int n = rng.uniform_int(3, 8);
    std::vector<double> angles(static_cast<size_t>(n));
    for (auto& a : angles) a = rng.uniform(0, 2 * std::numbers::pi);
    std::sort(angles.begin(), angles.end());
    std::vector<std::array<double, 2>> pts;
    double u0 = 1e9, v0 = 1e9, u1 = -1e9, v1 = -1e9;
    for (double a : angles) {
        const double r = rng.uniform(0.4, 1.0);
        pts.push_back({r * std::cos(a), r * std::sin(a)});
        u0 = std::min(u0, pts.back()[0]);
        u1 = std::max(u1, pts.back()[0]);
        v0 = std::min(v0, pts.back()[1]);
        v1 = std::max(v1, pts.back()[1]);
    }
    auto inside = [pts](double u, double v) {
        bool in = false;
        for (size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
            const auto& a = pts[i];
            const auto& b = pts[j];
            if ((a[1] > v) != (b[1] > v) && u < (b[0] - a[0]) * (v - a[1]) / (b[1] - a[1]) + a[0]) in = !in;
        }
        return in;
    };
    return {inside, u0, v0, u1, v1};
}

ShapeSpec blob(Rng& rng)
{
    std::array<double, 3> amp{}, phase{};
    for (size_t k = 0; k < 3; ++k) {
        amp[k] = rng.uniform(-0.25, 0.25);
        phase[k] = rng.uniform(0, 2 * std::numbers::pi);
    }
    auto radius = [amp, phase](double theta) {
        double r = 1;
        for (size_t k = 0; k < 3; ++k) r += amp[k] * std::cos(static_cast<double>(k + 2) * theta + phase[k]);
        return r;
    };
    double u0 = 1e9, v0 = 1e9, u1 = -1e9, v1 = -1e9;
    for (int i = 0; i < 1024; ++i) {
        const double t = 2 * std::numbers::pi * i / 1024;
        const double r = radius(t);
        u0 = std::min(u0, r * std::cos(t));
        u1 = std::max(u1, r * std::cos(t));
        v0 = std::min(v0, r * std::sin(t));
        v1 = std::max(v1, r * std::sin(t));
    }
    auto inside = [radius](double u, double v) { return std::hypot(u, v) <= radius(std::atan2(v, u)); };
    return {inside, u0, v0, u1, v1};
}

// Supersampled coverage of `shape` stretched over a bw x bh pixel box.
Image rasterize(const ShapeSpec& shape, int bw, int bh, int ss)
{
    Image alpha(1, bh, bw);
    const double su = (shape.u1 - shape.u0) / bw, sv = (shape.v1 - shape.v0) / bh;
    for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x) {
            int hits = 0;
            for (int j = 0; j < ss; ++j)
                for (int i = 0; i < ss; ++i) {
                    const double u = shape.u0 + (x + (i + 0.5) / ss) * su;
                    const double v = shape.v0 + (y + (j + 0.5) / ss) * sv;
                    hits += shape.inside(u, v);
                }
            alpha.at(0, y, x) = static_cast<Real>(static_cast<double>(hits) / (ss * ss));
        }
    return alpha;
}

Image crop(const Image& im, const BBox& b)
{
    Image out(im.channels, b.h, b.w);
    for (int c = 0; c < im.channels; ++c)
        for (int y = 0; y < b.h; ++y)
            for (int x = 0; x < b.w; ++x) out.at(c, y, x) = im.at(c, b.y + y, b.x + x);
    return out;
}

BBox tight_bbox(const Image& alpha)
{
    int x0 = alpha.width, y0 = alpha.height, x1 = -1, y1 = -1;
    for (int y = 0; y < alpha.height; ++y)
        for (int x = 0; x < alpha.width; ++x)
            if (alpha.at(0, y, x) > 0) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
    if (x1 < 0) return {};
    return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

// Bilinear sample with clamp-to-edge.
Real bilinear(const Image& im, int c, double sy, double sx)
{
    sy = std::clamp(sy, 0.0, static_cast<double>(im.height - 1));
    sx = std::clamp(sx, 0.0, static_cast<double>(im.width - 1));
    const int y0 = static_cast<int>(sy), x0 = static_cast<int>(sx);
    const int y1 = std::min(y0 + 1, im.height - 1), x1 = std::min(x0 + 1, im.width - 1);
    const double ty = sy - y0, tx = sx - x0;
    const double top = (1 - tx) * im.at(c, y0, x0) + tx * im.at(c, y0, x1);
    const double bot = (1 - tx) * im.at(c, y1, x0) + tx * im.at(c, y1, x1);
    return static_cast<Real>((1 - ty) * top + ty * bot);
}

Image crop_resize(const Image& im, double oy, double ox, double ch, double cw)
{
    Image out(im.channels, im.height, im.width);
    const double sy = ch / im.height, sx = cw / im.width;
    for (int c = 0; c < im.channels; ++c)
        for (int y = 0; y < im.height; ++y)
            for (int x = 0; x < im.width; ++x)
                out.at(c, y, x) = bilinear(im, c, oy + (y + 0.5) * sy - 0.5, ox + (x + 0.5) * sx - 0.5);
    return out;
}

Image flip(const Image& im)
{
    Image out = im;
    for (int c = 0; c < im.channels; ++c)
        for (int y = 0; y < im.height; ++y)
            for (int x = 0; x < im.width; ++x) out.at(c, y, x) = im.at(c, y, im.width - 1 - x);
    return out;
}

std::string sample_path(const fs::path& dir, int64_t index, const char* suffix)
{
    return (dir / (std::to_string(index) + suffix)).string();
}

}  // namespace

void SynthConfig::validate() const
{
    if (height < 8 || width < 8) throw ConfigError("synthetic images must be at least 8 x 8");
    if (!(fg_min_frac > 0 && fg_min_frac <= fg_max_frac && fg_max_frac <= 1))
        throw ConfigError("foreground fractions must satisfy 0 < min <= max <= 1");
    if (max_margin_frac < 0) throw ConfigError("max_margin_frac must be >= 0");
    if (supersample < 1) throw ConfigError("supersample must be >= 1");
    for (const auto* mix : {&background_mix, &foreground_mix}) {
        if (std::any_of(mix->begin(), mix->end(), [](double w) { return w < 0; }) ||
            (*mix)[0] + (*mix)[1] + (*mix)[2] <= 0)
            throw ConfigError("style mix weights must be >= 0 with a positive sum");
    }
    if (augment.flip_prob < 0 || augment.flip_prob > 1 || augment.crop_min <= 0 || augment.crop_min > 1 ||
        augment.brightness < 0 || augment.contrast < 0 || augment.contrast >= 1)
        throw ConfigError("augmentation ranges out of bounds");
}

Image synth_background(const SynthConfig& config, Rng& rng)
{
    Image im(3, config.height, config.width);
    do {
        switch (pick(config.background_mix, rng)) {
        case 0: fill_gradient(im, rng); break;
        case 1: fill_noise(im, rng); break;
        default: fill_shapes(im, rng); break;
        }
    } while (pixel_std(im) <= 0.02);
    return im;
}

Foreground synth_foreground(const SynthConfig& config, Rng& rng)
{
    const auto fits = [&](int extent, int side) {
        const double f = static_cast<double>(extent) / side;
        return f >= config.fg_min_frac && f <= config.fg_max_frac;
    };
    for (int attempt = 0; attempt < 1000; ++attempt) {
        ShapeSpec shape;
        switch (pick(config.foreground_mix, rng)) {
        case 0: shape = glyph_strokes(rng); break;
        case 1: shape = polygon(rng); break;
        default: shape = blob(rng); break;
        }
        const int bw = static_cast<int>(std::lround(rng.uniform(config.fg_min_frac, config.fg_max_frac) * config.width));
        const int bh = static_cast<int>(std::lround(rng.uniform(config.fg_min_frac, config.fg_max_frac) * config.height));
        const Image alpha = rasterize(shape, std::max(bw, 1), std::max(bh, 1), config.supersample);
        const BBox box = tight_bbox(alpha);
        const Color c0 = random_color(rng), c1 = random_color(rng);
        const bool two_tone = rng.bernoulli(0.5);
        if (box.w == 0 || !fits(box.w, config.width) || !fits(box.h, config.height)) continue;

        Foreground fg{Image(3, box.h, box.w), crop(alpha, box)};
        for (int y = 0; y < box.h; ++y) {
            const double t = two_tone ? (y + 0.5) / box.h : 0.0;
            for (int x = 0; x < box.w; ++x)
                for (int c = 0; c < 3; ++c) fg.colors.at(c, y, x) = clamp_signed(c0[c] + (c1[c] - c0[c]) * t);
        }
        return fg;
    }
    throw ConfigError("could not draw a foreground within the configured size fractions");
}

Sample compose_at(const Image& background, const Foreground& fg, int x0, int y0)
{
    if (background.channels != 3 || fg.colors.channels != 3 || fg.alpha.channels != 1 ||
        fg.colors.height != fg.alpha.height || fg.colors.width != fg.alpha.width)
        throw DimensionError("compose expects a 3-channel background, 3-channel colors and 1-channel alpha");
    if (x0 < 0 || y0 < 0 || x0 + fg.alpha.width > background.width || y0 + fg.alpha.height > background.height)
        throw ArgumentError("foreground does not fit inside the image");
    Sample s{background, background, Image(1, background.height, background.width)};
    for (int y = 0; y < fg.alpha.height; ++y)
        for (int x = 0; x < fg.alpha.width; ++x) {
            const Real a = fg.alpha.at(0, y, x);
            s.z.at(0, y0 + y, x0 + x) = a;
            for (int c = 0; c < 3; ++c) {
                const Real bg = background.at(c, y0 + y, x0 + x);
                s.x.at(c, y0 + y, x0 + x) = a * fg.colors.at(c, y, x) + (1 - a) * bg;
            }
        }
    return s;
}

Sample compose(const Image& background, const Foreground& fg, const SynthConfig& config, Rng& margin_rng,
               SampleInfo* info)
{
    const int H = background.height, W = background.width;
    const int fh = fg.alpha.height, fw = fg.alpha.width;
    if (fh > H || fw > W)
        throw ArgumentError("foreground " + std::to_string(fw) + "x" + std::to_string(fh) + " exceeds image " +
                            std::to_string(W) + "x" + std::to_string(H));
    const int feasible = std::min((H - fh) / 2, (W - fw) / 2);
    const int policy = static_cast<int>(std::floor(config.max_margin_frac * std::max(fh, fw)));
    const int margin = margin_rng.uniform_int(0, std::min(feasible, policy));

    int x0 = 0, y0 = 0;
    const int side = margin_rng.uniform_int(0, 3);
    if (side < 2) {
        y0 = side == 0 ? margin : H - fh - margin;
        x0 = margin_rng.uniform_int(margin, W - fw - margin);
    } else {
        x0 = side == 2 ? margin : W - fw - margin;
        y0 = margin_rng.uniform_int(margin, H - fh - margin);
    }
    if (info) {
        info->margin = margin;
        info->bbox = {x0, y0, fw, fh};
    }
    return compose_at(background, fg, x0, y0);
}

Sample flip_horizontal(const Sample& sample) { return {flip(sample.x), flip(sample.y), flip(sample.z)}; }

Sample augment(const Sample& sample, const AugmentConfig& config, Rng& rng)
{
    if (config.is_identity()) return sample;
    Sample s = rng.bernoulli(config.flip_prob) ? flip_horizontal(sample) : sample;

    const double scale = rng.uniform(config.crop_min, 1.0);
    const double ch = scale * s.x.height, cw = scale * s.x.width;
    const double oy = rng.uniform(0, s.x.height - ch), ox = rng.uniform(0, s.x.width - cw);
    if (scale < 1) s = {crop_resize(s.x, oy, ox, ch, cw), crop_resize(s.y, oy, ox, ch, cw), crop_resize(s.z, oy, ox, ch, cw)};

    const double shift = rng.uniform(-config.brightness, config.brightness);
    const double gain = rng.uniform(1 - config.contrast, 1 + config.contrast);
    if (shift == 0 && gain == 1) return s;

    // Jitter background and foreground colors separately, then recomposite so
    // that x stays an alpha blend of the jittered layers.
    const auto jitter = [&](double v) { return std::clamp(gain * v + shift, -1.0, 1.0); };
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < s.x.height; ++y)
            for (int x = 0; x < s.x.width; ++x) {
                const double a = s.z.at(0, y, x);
                const double bg = s.y.at(c, y, x);
                const double new_bg = jitter(bg);
                s.y.at(c, y, x) = static_cast<Real>(new_bg);
                if (a <= 0) {
                    s.x.at(c, y, x) = static_cast<Real>(new_bg);
                } else {
                    const double fg = (s.x.at(c, y, x) - (1 - a) * bg) / a;
                    s.x.at(c, y, x) = static_cast<Real>(a * jitter(fg) + (1 - a) * new_bg);
                }
            }
    return s;
}

Sample synth_sample(const SynthConfig& config, uint64_t seed, int64_t index, SampleInfo* info)
{
    config.validate();
    const Rng root(derive_seed(seed, static_cast<uint64_t>(index)));
    Rng bg_rng = root.child(1), fg_rng = root.child(2), margin_rng = root.child(3);
    const Image background = synth_background(config, bg_rng);
    const Foreground fg = synth_foreground(config, fg_rng);
    if (info) info->seed = root.seed();
    return compose(background, fg, config, margin_rng, info);
}

std::vector<Sample> synth_samples(const SynthConfig& config, uint64_t seed, int64_t n, std::vector<SampleInfo>* infos)
{
    if (n < 1) throw ArgumentError("sample count must be >= 1");
    std::vector<Sample> samples(static_cast<size_t>(n));
    std::vector<SampleInfo> meta(static_cast<size_t>(n));
    parallel_for(n, 1, [&](int64_t begin, int64_t end) {
        for (int64_t i = begin; i < end; ++i)
            samples[static_cast<size_t>(i)] = synth_sample(config, seed, i, &meta[static_cast<size_t>(i)]);
    });
    if (infos) *infos = std::move(meta);
    return samples;
}

void make_dataset(const SynthConfig& config, uint64_t seed, int64_t n, const std::string& root,
                  const std::string& split)
{
    std::vector<SampleInfo> infos;
    const auto samples = synth_samples(config, seed, n, &infos);
    const fs::path dir = fs::path(root) / split;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    parallel_for(n, 1, [&](int64_t begin, int64_t end) {
        for (int64_t i = begin; i < end; ++i) {
            const auto& s = samples[static_cast<size_t>(i)];
            write_png(sample_path(dir, i, "_x.png"), s.x, true);
            write_png(sample_path(dir, i, "_y.png"), s.y, true);
            write_png(sample_path(dir, i, "_z.png"), s.z, false);
        }
    });

    std::ofstream manifest(dir / "manifest.csv");
    if (!manifest) throw IoError("cannot write manifest in " + dir.string());
    manifest << "index,seed,margin,bbox\n";
    for (int64_t i = 0; i < n; ++i) {
        const auto& m = infos[static_cast<size_t>(i)];
        manifest << i << ',' << m.seed << ',' << m.margin << ',' << m.bbox.x << ' ' << m.bbox.y << ' ' << m.bbox.w
                 << ' ' << m.bbox.h << '\n';
    }
    if (!manifest) throw IoError("failed writing manifest in " + dir.string());
}

std::vector<Sample> load_dataset(const std::string& root, const std::string& split)
{
    const fs::path dir = fs::path(root) / split;
    std::ifstream manifest(dir / "manifest.csv");
    if (!manifest) throw IoError("missing " + (dir / "manifest.csv").string());
    std::string line;
    std::getline(manifest, line);
    if (line.rfind("index", 0) != 0) throw IoError("manifest header must start with 'index'");

    std::vector<int64_t> indices;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        try {
            indices.push_back(std::stoll(line.substr(0, line.find(','))));
        } catch (const std::exception&) {
            throw IoError("bad manifest row: " + line);
        }
    }
    if (indices.empty()) throw IoError("manifest in " + dir.string() + " lists no samples");

    std::vector<Sample> samples(indices.size());
    parallel_for(static_cast<int64_t>(indices.size()), 1, [&](int64_t begin, int64_t end) {
        for (int64_t i = begin; i < end; ++i) {
            const int64_t index = indices[static_cast<size_t>(i)];
            Sample s{read_png(sample_path(dir, index, "_x.png"), true), read_png(sample_path(dir, index, "_y.png"), true),
                     read_png(sample_path(dir, index, "_z.png"), false)};
            if (s.x.channels != 3 || s.y.channels != 3) throw IoError("sample " + std::to_string(index) + " is not RGB");
            if (s.z.channels == 3) {
                Image z(1, s.z.height, s.z.width);
                for (int y = 0; y < z.height; ++y)
                    for (int x = 0; x < z.width; ++x)
                        z.at(0, y, x) = (s.z.at(0, y, x) + s.z.at(1, y, x) + s.z.at(2, y, x)) / 3;
                s.z = std::move(z);
            }
            if (!s.x.same_shape(s.y) || s.z.height != s.x.height || s.z.width != s.x.width)
                throw IoError("sample " + std::to_string(index) + " has mismatched image sizes");
            samples[static_cast<size_t>(i)] = std::move(s);
        }
    });
    return samples;
}

Batch make_batch(const std::vector<Sample>& samples)
{
    if (samples.empty()) throw ArgumentError("empty batch");
    std::vector<Tensor> xs, ys, zs;
    for (const auto& s : samples) {
        xs.push_back(to_tensor(s.x));
        ys.push_back(to_tensor(s.y));
        zs.push_back(to_tensor(s.z));
    }
    return {stack_batch(xs), stack_batch(ys), stack_batch(zs)};
}

}  // namespace neglectnet
