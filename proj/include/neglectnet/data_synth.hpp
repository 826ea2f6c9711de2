#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "neglectnet/image.hpp"
#include "neglectnet/rng.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// Composite x, background y and soft foreground alpha z. x and y are
/// 3 x H x W in [-1, 1]; z is 1 x H x W in [0, 1].
struct Sample {
    Image x;
    Image y;
    Image z;
};

struct BBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/// Provenance recorded in the dataset manifest.
struct SampleInfo {
    uint64_t seed = 0;
    int margin = 0;
    BBox bbox;
};

struct AugmentConfig {
    double flip_prob = 0.5;
    double crop_min = 0.85;      // crop side as a fraction of the image side
    double brightness = 0.1;     // additive shift drawn from [-b, b]
    double contrast = 0.1;       // gain drawn from [1 - c, 1 + c]

    bool is_identity() const { return flip_prob <= 0 && crop_min >= 1 && brightness <= 0 && contrast <= 0; }
    static AugmentConfig identity() { return {0, 1, 0, 0}; }
};

struct SynthConfig {
    int height = 32;
    int width = 32;
    // Relative weights of the background styles: gradient, value noise, shapes.
    std::array<double, 3> background_mix{1, 1, 1};
    // Relative weights of the foreground styles: glyph strokes, polygons, blobs.
    std::array<double, 3> foreground_mix{1, 1, 1};
    double fg_min_frac = 0.25;
    double fg_max_frac = 0.9;
    double max_margin_frac = 0.5;  // margin upper bound as a fraction of the larger bbox side
    int supersample = 4;
    AugmentConfig augment;

    void validate() const;
};

struct Foreground {
    Image colors;  // 3 x h x w, tight around the shape
    Image alpha;   // 1 x h x w
};

Image synth_background(const SynthConfig& config, Rng& rng);

/// The returned patch is the tight bounding box of alpha > 0; its sides lie
/// in [fg_min_frac, fg_max_frac] of the image sides.
Foreground synth_foreground(const SynthConfig& config, Rng& rng);

/// Places `fg` over `background` so that the distance from the foreground box
/// to the nearest image edge is a draw from [0, max_margin_frac * side].
Sample compose(const Image& background, const Foreground& fg, const SynthConfig& config, Rng& margin_rng,
               SampleInfo* info = nullptr);

/// Places `fg` with its top-left corner at (x0, y0).
Sample compose_at(const Image& background, const Foreground& fg, int x0, int y0);

Sample augment(const Sample& sample, const AugmentConfig& config, Rng& rng);
Sample flip_horizontal(const Sample& sample);

/// Sample `index` of the dataset keyed by `seed`; independent of every other index.
Sample synth_sample(const SynthConfig& config, uint64_t seed, int64_t index, SampleInfo* info = nullptr);
std::vector<Sample> synth_samples(const SynthConfig& config, uint64_t seed, int64_t n,
                                  std::vector<SampleInfo>* infos = nullptr);

/// Writes <root>/<split>/<index>_{x,y,z}.png and <root>/<split>/manifest.csv.
void make_dataset(const SynthConfig& config, uint64_t seed, int64_t n, const std::string& root,
                  const std::string& split);

/// Loads every row of <root>/<split>/manifest.csv. Works for user-supplied
/// triples in the same layout; only the index column is required.
std::vector<Sample> load_dataset(const std::string& root, const std::string& split);

/// Batched tensors for a list of samples.
struct Batch {
    Tensor x;  // B x 3 x H x W
    Tensor y;  // B x 3 x H x W
    Tensor z;  // B x 1 x H x W
};
Batch make_batch(const std::vector<Sample>& samples);

}  // namespace neglectnet
