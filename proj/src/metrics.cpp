#include "neglectnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "neglectnet/ops.hpp"
#include "neglectnet/parallel.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void check_same(const Image& a, const Image& b)
{
    if (!a.same_shape(b)) throw DimensionError("metric inputs differ in shape");
    if (a.data.empty()) throw ArgumentError("metric inputs are empty");
}

std::array<double, kWindow> gaussian_taps()
{
    std::array<double, kWindow> taps{};
    double total = 0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        taps[static_cast<size_t>(i)] = std::exp(-d * d / (2 * kSigma * kSigma));
        total += taps[static_cast<size_t>(i)];
    }
    for (auto& t : taps) t /= total;
    return taps;
}

// Valid-mode separable Gaussian filter of one channel.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w)
{
    static const auto taps = gaussian_taps();
    const int oh = h - kWindow + 1, ow = w - kWindow + 1;
    std::vector<double> rows(static_cast<size_t>(h) * ow);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0;
            for (int k = 0; k < kWindow; ++k) s += taps[static_cast<size_t>(k)] * src[static_cast<size_t>(y) * w + x + k];
            rows[static_cast<size_t>(y) * ow + x] = s;
        }
    std::vector<double> out(static_cast<size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0;
            for (int k = 0; k < kWindow; ++k) s += taps[static_cast<size_t>(k)] * rows[static_cast<size_t>(y + k) * ow + x];
            out[static_cast<size_t>(y) * ow + x] = s;
        }
    return out;
}

}  // namespace

double l1_pct(const Image& a, const Image& b, double value_range)
{
    check_same(a, b);
    if (!(value_range > 0)) throw ArgumentError("value_range must be > 0");
    double s = 0;
    for (size_t i = 0; i < a.data.size(); ++i) s += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
    return s / static_cast<double>(a.data.size()) / value_range * 100.0;
}

double psnr(const Image& a, const Image& b, double max_val)
{
    check_same(a, b);
    double s = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        s += d * d;
    }
    const double mse = s / static_cast<double>(a.data.size());
    if (mse == 0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(max_val * max_val / mse));
}

double ssim(const Image& a, const Image& b, double data_range)
{
    check_same(a, b);
    if (a.height < kWindow || a.width < kWindow)
        throw ArgumentError("SSIM needs images of at least 11 x 11 pixels");
    const double c1 = (kK1 * data_range) * (kK1 * data_range);
    const double c2 = (kK2 * data_range) * (kK2 * data_range);
    const int h = a.height, w = a.width;
    const size_t plane = static_cast<size_t>(h) * w;

    double total = 0;
    for (int c = 0; c < a.channels; ++c) {
        std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
        for (size_t i = 0; i < plane; ++i) {
            x[i] = a.data[c * plane + i];
            y[i] = b.data[c * plane + i];
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mx = filter_valid(x, h, w), my = filter_valid(y, h, w);
        const auto sxx = filter_valid(xx, h, w), syy = filter_valid(yy, h, w), sxy = filter_valid(xy, h, w);
        double sum = 0;
        for (size_t i = 0; i < mx.size(); ++i) {
            const double vx = sxx[i] - mx[i] * mx[i];
            const double vy = syy[i] - my[i] * my[i];
            const double cov = sxy[i] - mx[i] * my[i];
            sum += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
                   ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
        }
        total += sum / static_cast<double>(mx.size());
    }
    return total / a.channels;
}

double mask_iou(const std::vector<Image>& predicted, const std::vector<Image>& truth)
{
    if (predicted.size() != truth.size()) throw DimensionError("mask lists differ in length");
    int64_t inter = 0, uni = 0;
    for (size_t k = 0; k < predicted.size(); ++k) {
        check_same(predicted[k], truth[k]);
        for (size_t i = 0; i < predicted[k].data.size(); ++i) {
            const bool p = predicted[k].data[i] > Real(0.5), t = truth[k].data[i] > Real(0.5);
            inter += p && t;
            uni += p || t;
        }
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Image to_unit_range(const Image& im)
{
    Image out = im;
    for (auto& v : out.data) v = (v + 1) / 2;
    return out;
}

EvalResult evaluate_predictions(const std::vector<Image>& y_pred, const std::vector<Image>& y_true,
                                const std::vector<Image>& z_pred, const std::vector<Image>& z_true)
{
    if (y_pred.empty()) throw ArgumentError("cannot evaluate an empty split");
    if (y_pred.size() != y_true.size()) throw DimensionError("prediction and ground-truth counts differ");
    const auto n = static_cast<int64_t>(y_pred.size());
    std::vector<double> l1(y_pred.size()), ps(y_pred.size()), ss(y_pred.size());
    parallel_for(n, 1, [&](int64_t begin, int64_t end) {
        for (int64_t i = begin; i < end; ++i) {
            const auto k = static_cast<size_t>(i);
            const Image p = to_unit_range(y_pred[k]), t = to_unit_range(y_true[k]);
            l1[k] = l1_pct(p, t);
            ps[k] = psnr(p, t);
            ss[k] = ssim(p, t);
        }
    });
    EvalResult r;
    r.n_samples = n;
    for (size_t k = 0; k < y_pred.size(); ++k) {
        r.l1_pct += l1[k] / static_cast<double>(n);
        r.psnr_db += ps[k] / static_cast<double>(n);
        r.ssim += ss[k] / static_cast<double>(n);
    }
    if (!z_pred.empty()) r.mask_iou = mask_iou(z_pred, z_true);
    return r;
}

EvalResult evaluate(const GeneratorParams& g, const std::vector<Sample>& split, int batch_size)
{
    if (split.empty()) throw ArgumentError("cannot evaluate an empty split");
    if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
    NoGradGuard no_grad;
    std::vector<Image> y_pred, y_true, z_pred, z_true;
    for (size_t start = 0; start < split.size(); start += static_cast<size_t>(batch_size)) {
        const size_t end = std::min(split.size(), start + static_cast<size_t>(batch_size));
        std::vector<Sample> chunk(split.begin() + static_cast<std::ptrdiff_t>(start),
                                  split.begin() + static_cast<std::ptrdiff_t>(end));
        const Batch batch = make_batch(chunk);
        const GeneratorOutput out = generator_forward(g, batch.x);
        for (size_t k = 0; k < chunk.size(); ++k) {
            y_pred.push_back(to_image(out.y_p, static_cast<int64_t>(k)));
            y_true.push_back(chunk[k].y);
            if (out.z_p.defined()) {
                z_pred.push_back(to_image(out.z_p, static_cast<int64_t>(k)));
                z_true.push_back(chunk[k].z);
            }
        }
    }
    return evaluate_predictions(y_pred, y_true, z_pred, z_true);
}

void write_eval_csv(const std::string& path, const EvalResult& r)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "metric,value,n\n" << std::setprecision(9);
    out << "l1_pct," << r.l1_pct << ',' << r.n_samples << '\n';
    out << "psnr_db," << r.psnr_db << ',' << r.n_samples << '\n';
    out << "ssim," << r.ssim << ',' << r.n_samples << '\n';
    if (r.has_mask()) out << "mask_iou," << r.mask_iou << ',' << r.n_samples << '\n';
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace neglectnet
