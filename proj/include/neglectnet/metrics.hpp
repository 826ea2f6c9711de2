#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neglectnet/data_synth.hpp"
#include "neglectnet/generator.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

inline constexpr double kPsnrCap = 99.0;

/// mean |a - b| / value_range * 100.
double l1_pct(const Image& a, const Image& b, double value_range = 1.0);

/// 10 log10(max_val^2 / MSE), or kPsnrCap when the images are identical.
double psnr(const Image& a, const Image& b, double max_val = 1.0);

/// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5, K1 0.01, K2 0.03),
/// averaged over channels. Images are assumed to span [0, data_range].
double ssim(const Image& a, const Image& b, double data_range = 1.0);

/// Pooled intersection over union of the pixels above 0.5.
double mask_iou(const std::vector<Image>& predicted, const std::vector<Image>& truth);

struct EvalResult {
    double l1_pct = 0;
    double psnr_db = 0;
    double ssim = 0;
    double mask_iou = -1;  // negative when no mask prediction exists
    int64_t n_samples = 0;

    bool has_mask() const { return mask_iou >= 0; }
};

/// [-1, 1] image mapped to [0, 1].
Image to_unit_range(const Image& im);

/// Metrics between predicted and true backgrounds given in [-1, 1]; masks
/// are optional (pass empty vectors).
EvalResult evaluate_predictions(const std::vector<Image>& y_pred, const std::vector<Image>& y_true,
                                const std::vector<Image>& z_pred = {}, const std::vector<Image>& z_true = {});

/// Runs the generator over the split and scores y_p against y_g (and z_p against z_g).
EvalResult evaluate(const GeneratorParams& g, const std::vector<Sample>& split, int batch_size = 8);

/// CSV with header metric,value,n.
void write_eval_csv(const std::string& path, const EvalResult& r);

}  // namespace neglectnet
