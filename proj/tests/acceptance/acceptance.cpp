// Acceptance suite: one PASS/FAIL line per criterion A1..A7, followed by
// indented detail lines. Exit status is 0 when every criterion passes or
// failed only among those named by --allow-red.

#include <CLI11.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gradient_suite.hpp"
#include "neglectnet/checkpoint.hpp"
#include "neglectnet/metrics.hpp"
#include "neglectnet/ops.hpp"
#include "neglectnet/training.hpp"

using namespace neglectnet;
namespace fs = std::filesystem;

namespace {

// A1
constexpr double kOpTolerance = 1e-3;
constexpr double kNetTolerance = 1e-2;
constexpr double kGradSuiteSeconds = 120;
constexpr uint64_t kGradSeed = 1;
// A3
constexpr int64_t kOverfitSteps = 2000;
constexpr int kOverfitSamples = 8;
constexpr int kOverfitBatch = 4;
constexpr double kOverfitL1 = 0.05;  // mean |y_g - y_p| on the [-1, 1] scale
constexpr double kOverfitIoU = 0.8;
constexpr double kOverfitSeconds = 20 * 60;
constexpr uint64_t kOverfitDataSeed = 42;
// A4
constexpr int64_t kAblationTrain = 256;
constexpr int64_t kAblationTest = 64;
constexpr int64_t kAblationSteps = 1500;
constexpr int kAblationBatch = 8;
constexpr double kAblationSlack = 0.2;  // L1 percentage points
constexpr uint64_t kAblationTrainSeed = 1001;
constexpr uint64_t kAblationTestSeed = 2002;
// A5
constexpr double kLossTolerance = 1e-6;
// shared
constexpr double kLr = 1e-4;
constexpr uint64_t kTrainSeed = 7;

struct Criterion {
    std::string id;
    std::string title;
    bool passed = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what)
    {
        passed = passed && ok;
        details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
    void info(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void report(const Criterion& c)
{
    std::printf("%s %s %s\n", c.passed ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str());
    for (const auto& d : c.details) std::printf("       %s\n", d.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TrainConfig small_config(UpsampleMode mode, bool full, int batch, int64_t steps)
{
    TrainConfig c;
    c.net.depth = 4;
    c.net.base_width = 8;
    c.net.image_h = c.net.image_w = 32;
    c.net.upsample_mode = mode;
    c.net.use_neglect_branch = full;
    c.batch_size = batch;
    c.steps = steps;
    c.lr = kLr;
    c.beta1 = 0.5;
    c.beta2 = 0.999;
    c.weights = LossWeights{};
    c.seed = kTrainSeed;
    return c;
}

struct Predictions {
    std::vector<Image> y, z;
    std::vector<Tensor> masks;  // every neglect mask of every batch
};

Predictions predict(const GeneratorParams& g, const std::vector<Sample>& data)
{
    NoGradGuard no_grad;
    Predictions p;
    for (size_t i = 0; i < data.size(); i += 8) {
        const std::vector<Sample> chunk(data.begin() + static_cast<std::ptrdiff_t>(i),
                                        data.begin() + static_cast<std::ptrdiff_t>(std::min(data.size(), i + 8)));
        const auto out = generator_forward(g, make_batch(chunk).x);
        for (int64_t b = 0; b < static_cast<int64_t>(chunk.size()); ++b) {
            p.y.push_back(to_image(out.y_p, b));
            if (out.z_p.defined()) p.z.push_back(to_image(out.z_p, b));
        }
        for (const auto& m : out.neglect_masks) p.masks.push_back(m);
    }
    return p;
}

double mean_abs_diff(const std::vector<Image>& a, const std::vector<Sample>& data)
{
    double total = 0;
    size_t n = 0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < a[i].data.size(); ++k, ++n) total += std::abs(a[i].data[k] - data[i].y.data[k]);
    return total / static_cast<double>(n);
}

struct OverfitRun {
    double l1 = 0, iou = 0, seconds = 0;
    bool finite = true;
    std::string error;
    TrainState state;
};

OverfitRun overfit(UpsampleMode mode, const std::vector<Sample>& data)
{
    const auto config = small_config(mode, true, kOverfitBatch, kOverfitSteps);
    OverfitRun r{.state = init_training(config)};
    const auto t0 = std::chrono::steady_clock::now();
    TrainHooks hooks;
    hooks.on_step = [&](const StepRecord& s) {
        for (double v : {s.l_g, s.l_adv, s.l1_y, s.l1_z, s.l_d}) r.finite = r.finite && std::isfinite(v);
    };
    try {
        train(r.state, config, data, hooks);
    } catch (const std::exception& e) {
        r.finite = false;
        r.error = e.what();
    }
    r.seconds = seconds_since(t0);
    const auto p = predict(r.state.g, data);
    std::vector<Image> truth;
    for (const auto& s : data) truth.push_back(s.z);
    r.l1 = mean_abs_diff(p.y, data);
    r.iou = mask_iou(p.z, truth);
    return r;
}

bool masks_open_interval(const std::vector<Tensor>& masks, double& lo, double& hi)
{
    lo = 1;
    hi = 0;
    for (const auto& m : masks)
        for (int64_t i = 0; i < m.numel(); ++i) {
            lo = std::min<double>(lo, m[i]);
            hi = std::max<double>(hi, m[i]);
        }
    return lo > 0 && hi < 1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

uint64_t fnv1a(const std::string& bytes, uint64_t h = 1469598103934665603ull)
{
    for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ull;
    return h;
}

uint64_t tree_hash(const fs::path& root)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
    uint64_t h = fnv1a("");
    for (const auto& [name, bytes] : files) h = fnv1a(bytes, fnv1a(name, h));
    return h;
}

int run_tool(const fs::path& dir, const std::string& args)
{
    const std::string cmd = "cd '" + dir.string() + "' && '" NEGLECTNET_TOOL "' " + args + " > tool.log 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

Criterion a1_gradients(const acceptance::SuiteResult& suite)
{
    Criterion c{"A1", "gradient suite"};
    double op_max = 0, net_max = 0;
    bool ops_ok = true, nets_ok = true;
    for (const auto& e : suite.ops) {
        op_max = std::max(op_max, e.max_rel_error);
        ops_ok = ops_ok && e.max_rel_error < kOpTolerance;
        if (e.max_rel_error >= kOpTolerance) c.info("op over tolerance: " + e.name);
    }
    for (const auto& e : suite.networks) {
        net_max = std::max(net_max, e.max_rel_error);
        nets_ok = nets_ok && e.max_rel_error < kNetTolerance;
        c.info(fmt("%-40s %.2e", e.name.c_str(), e.max_rel_error));
    }
    c.check(ops_ok, fmt("%zu ops: max relative error %.2e < %.0e", suite.ops.size(), op_max, kOpTolerance));
    c.check(nets_ok, fmt("%zu end-to-end nets: max relative error %.2e < %.0e", suite.networks.size(), net_max,
                         kNetTolerance));
    c.check(suite.seconds < kGradSuiteSeconds, fmt("runtime %.1f s < %.0f s", suite.seconds, kGradSuiteSeconds));
    c.check(suite.fault_detected, "injected wrong backward rule is reported as a failure");
    return c;
}

Criterion a2_architecture()
{
    Criterion c{"A2", "architecture conformance"};
    const NetConfig config = NetConfig::full_scale();
    const std::vector<int> expected = {64, 128, 256, 512, 512, 512, 512};
    std::vector<int> widths;
    for (int i = 1; i <= config.depth; ++i) widths.push_back(config.width(i));
    c.check(config.depth == 7 && config.base_width == 64 && widths == expected,
            "depth 7 / base 64 widths 64,128,256,512,512,512,512");

    const auto g = build_generator(config, 1);
    bool shapes = true;
    for (int i = 1; i <= config.depth; ++i) {
        const auto& w = g.params.at("enc." + std::to_string(i) + ".weight");
        shapes = shapes && w.dim(0) == expected[static_cast<size_t>(i - 1)];
    }
    for (int i = 2; i <= config.depth; ++i) {
        const int below = expected[static_cast<size_t>(i - 2)];
        shapes = shapes && g.params.at("seg." + std::to_string(i) + ".weight").dim(1) == below &&
                 g.params.at("fill." + std::to_string(i) + ".weight").dim(0) == below;
    }
    c.check(shapes, "dec-seg / dec-fill layer i has the kernel count of encoder layer i-1");

    Rng rng(3);
    std::vector<Real> px(3 * 128 * 128);
    for (auto& v : px) v = static_cast<Real>(rng.uniform(-1, 1));
    const Tensor x = Tensor::from_data({1, 3, 128, 128}, std::move(px));
    NoGradGuard no_grad;
    const auto out = generator_forward(g, x);
    c.check(out.z_p.shape() == Shape{1, 1, 128, 128}, "z_p is 1 x 1 x 128 x 128");
    c.check(out.y_p.shape() == Shape{1, 3, 128, 128}, "y_p is 1 x 3 x 128 x 128");
    c.check(out.neglect_masks.size() == 7, "one neglect mask per encoder stage");

    const auto d = build_discriminator(config, 2);
    const auto dout = discriminator_forward(d, x, out.y_p);
    c.check(dout.patches.shape() == Shape{1, 1, 4, 4}, "discriminator patch grid 4 x 4 on 128 x 128 input");
    double avg = 0;
    for (int64_t i = 0; i < 16; ++i) avg += dout.patches[i];
    avg /= 16;
    c.check(std::abs(avg - dout.score[0]) < 1e-6, fmt("score %.6f is the mean of the 16 patches", avg));
    return c;
}

Criterion a3_overfit(const OverfitRun& nn)
{
    Criterion c{"A3", "overfit 8 samples"};
    c.info(fmt("depth 4, base 8, 32x32, %d samples, batch %d, %lld steps, lr %.0e, nn_conv", kOverfitSamples,
               kOverfitBatch, static_cast<long long>(kOverfitSteps), kLr));
    c.check(nn.l1 < kOverfitL1, fmt("mean |y_g - y_p| %.4f < %.2f", nn.l1, kOverfitL1));
    c.check(nn.iou > kOverfitIoU, fmt("mask IoU %.3f > %.1f", nn.iou, kOverfitIoU));
    c.check(nn.finite, "all losses finite" + (nn.error.empty() ? "" : " (" + nn.error + ")"));
    c.check(nn.seconds < kOverfitSeconds, fmt("runtime %.0f s < %.0f s", nn.seconds, kOverfitSeconds));
    return c;
}

Criterion a4_ablation(double& full_l1, double& base_l1, std::vector<Tensor>& masks)
{
    Criterion c{"A4", "ablation direction"};
    const SynthConfig synth;
    const auto train_set = synth_samples(synth, kAblationTrainSeed, kAblationTrain);
    const auto test_set = synth_samples(synth, kAblationTestSeed, kAblationTest);
    c.info(fmt("%lld train / %lld test samples, %lld steps, batch %d", static_cast<long long>(kAblationTrain),
               static_cast<long long>(kAblationTest), static_cast<long long>(kAblationSteps), kAblationBatch));
    double l1[2] = {0, 0};
    for (bool full : {true, false}) {
        const auto config = small_config(UpsampleMode::nn_conv, full, kAblationBatch, kAblationSteps);
        auto state = init_training(config);
        const auto t0 = std::chrono::steady_clock::now();
        train(state, config, train_set);
        const auto result = evaluate(state.g, test_set);
        l1[full ? 0 : 1] = result.l1_pct;
        c.info(fmt("%-8s test L1%% %.3f  PSNR %.2f dB  SSIM %.4f%s  (%.0f s)", full ? "full" : "baseline",
                   result.l1_pct, result.psnr_db, result.ssim,
                   result.has_mask() ? fmt("  IoU %.3f", result.mask_iou).c_str() : "", seconds_since(t0)));
        if (full) masks = predict(state.g, test_set).masks;
    }
    full_l1 = l1[0];
    base_l1 = l1[1];
    c.check(full_l1 <= base_l1 + kAblationSlack,
            fmt("full %.3f <= baseline %.3f + %.1f", full_l1, base_l1, kAblationSlack));
    c.info(full_l1 <= base_l1 ? "full model at or below baseline" : "full model above baseline, within slack");
    return c;
}

Criterion a5_identities(const std::vector<std::pair<std::string, std::vector<Tensor>>>& mask_sets,
                        const std::vector<std::vector<Sample>>& sample_sets)
{
    Criterion c{"A5", "loss identities"};
    const Tensor half = Tensor::from_data({4}, {0.5, 0.5, 0.5, 0.5});
    const double l_d = discriminator_loss(half, half).item();
    c.check(std::abs(l_d - 2 * std::log(2.0)) <= kLossTolerance,
            fmt("discriminator loss at 0.5 = %.9f, 2 ln 2 = %.9f", l_d, 2 * std::log(2.0)));

    const Tensor y = Tensor::full({4, 3, 8, 8}, Real(0.25));
    const Tensor z = Tensor::full({4, 1, 8, 8}, Real(0.5));
    const auto l_g = generator_loss(half, y, y, z, z, {100, 100});
    const double adv = l_g.adversarial.item();
    c.check(std::abs(adv - std::log(2.0)) <= kLossTolerance,
            fmt("generator adversarial term at 0.5 = %.9f, ln 2 = %.9f", adv, std::log(2.0)));

    for (const auto& [name, masks] : mask_sets) {
        double lo, hi;
        const bool ok = masks_open_interval(masks, lo, hi);
        c.check(ok, fmt("neglect masks of %s in (0, 1): min %.3e, max 1 - %.3e", name.c_str(), lo, 1 - hi));
    }

    int64_t samples = 0, pixels = 0, violations = 0;
    for (const auto& set : sample_sets)
        for (const auto& s : set) {
            ++samples;
            for (int ch = 0; ch < s.x.channels; ++ch)
                for (int r = 0; r < s.x.height; ++r)
                    for (int col = 0; col < s.x.width; ++col)
                        if (s.z.at(0, r, col) == 0) {
                            ++pixels;
                            violations += s.x.at(ch, r, col) != s.y.at(ch, r, col);
                        }
        }
    c.check(violations == 0, fmt("x == y_g wherever z_g == 0: %lld violations in %lld values over %lld samples",
                                 static_cast<long long>(violations), static_cast<long long>(pixels),
                                 static_cast<long long>(samples)));
    return c;
}

Criterion a6_determinism(const TrainState& trained)
{
    Criterion c{"A6", "determinism and persistence"};
    const fs::path root = fs::temp_directory_path() / "neglectnet_acceptance_a6";
    fs::remove_all(root);
    uint64_t data_hash[2] = {0, 0}, ckpt_hash[2] = {0, 0};
    std::string ckpt[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = root / ("run" + std::to_string(run));
        fs::create_directories(dir);
        const std::string common = " --seed 11 --depth 4 --base_width 8 --image_size 32";
        ran = ran && run_tool(dir, "synth --n 16" + common) == 0;
        ran = ran && run_tool(dir, "train --steps 25 --batch_size 4 --checkpoint_every 10" + common) == 0;
        data_hash[run] = tree_hash(dir / "data");
        ckpt[run] = slurp(dir / "run/checkpoint.bin");
        ckpt_hash[run] = fnv1a(ckpt[run]);
    }
    c.check(ran, "CLI synth + train pipeline ran twice");
    c.check(data_hash[0] == data_hash[1],
            fmt("dataset regeneration hash %016llx vs %016llx", static_cast<unsigned long long>(data_hash[0]),
                static_cast<unsigned long long>(data_hash[1])));
    c.check(!ckpt[0].empty() && ckpt[0] == ckpt[1],
            fmt("checkpoints bit-identical: %016llx vs %016llx (%zu bytes)",
                static_cast<unsigned long long>(ckpt_hash[0]), static_cast<unsigned long long>(ckpt_hash[1]),
                ckpt[0].size()));

    const fs::path a = root / "a.bin", b = root / "b.bin";
    save_checkpoint(a.string(), trained);
    TrainState reloaded = trained;
    reloaded.g = build_generator(trained.g.config, 999);
    reloaded.d = build_discriminator(trained.d.config, 998);
    reloaded.adam_g = make_adam(reloaded.g.params);
    reloaded.adam_d = make_adam(reloaded.d.params);
    reloaded.step = 0;
    load_checkpoint(a.string(), reloaded);
    save_checkpoint(b.string(), reloaded);
    c.check(slurp(a) == slurp(b), fmt("save -> load -> save byte-identical (%zu bytes)", slurp(a).size()));
    return c;
}

Criterion a7_mode_parity(const acceptance::SuiteResult& suite, const OverfitRun& nn, const OverfitRun& deconv,
                         const std::vector<Sample>& data)
{
    Criterion c{"A7", "mode parity"};
    const Tensor x = make_batch(data).x;
    NoGradGuard no_grad;
    auto cfg_nn = small_config(UpsampleMode::nn_conv, true, 4, 0).net;
    auto cfg_de = cfg_nn;
    cfg_de.upsample_mode = UpsampleMode::deconv;
    const auto out_nn = generator_forward(build_generator(cfg_nn, 5), x);
    const auto out_de = generator_forward(build_generator(cfg_de, 5), x);
    bool same = out_nn.y_p.shape() == out_de.y_p.shape() && out_nn.z_p.shape() == out_de.z_p.shape() &&
                out_nn.neglect_masks.size() == out_de.neglect_masks.size();
    for (size_t i = 0; same && i < out_nn.neglect_masks.size(); ++i)
        same = out_nn.neglect_masks[i].shape() == out_de.neglect_masks[i].shape();
    c.check(same, "nn_conv and deconv output shapes identical (y_p " + shape_to_string(out_nn.y_p.shape()) + ")");

    for (const char* mode : {"nn_conv", "deconv"}) {
        bool found = false, ok = true;
        for (const auto& e : suite.networks)
            if (e.name.find(std::string("full ") + mode) != std::string::npos) {
                found = true;
                ok = ok && e.passed;
            }
        c.check(found && ok, std::string("A1 end-to-end check passes in ") + mode + " mode");
    }
    for (const auto* run : {&nn, &deconv}) {
        const bool ok = run->l1 < kOverfitL1 && run->iou > kOverfitIoU && run->finite;
        c.check(ok, fmt("A3 in %s mode: L1 %.4f, IoU %.3f", run == &nn ? "nn_conv" : "deconv", run->l1, run->iou));
    }

    for (const auto mode : {UpsampleMode::nn_conv, UpsampleMode::deconv}) {
        auto full_cfg = cfg_nn;
        full_cfg.upsample_mode = mode;
        auto base_cfg = full_cfg;
        base_cfg.use_neglect_branch = false;
        const auto full = build_generator(full_cfg, 9);
        GeneratorParams base = build_generator(base_cfg, 10);
        for (const auto& [name, t] : base.params.items()) {
            const auto src = full.params.at(name).data();
            std::copy(src.begin(), src.end(), base.params.at(name).mutable_data().begin());
        }
        const auto forced = generator_forward(full, x, {MaskOverride::ones});
        const auto plain = generator_forward(base, x);
        bool identical = forced.fill_inputs.size() == plain.fill_inputs.size();
        for (size_t i = 0; identical && i < plain.fill_inputs.size(); ++i) {
            const auto a = forced.fill_inputs[i].data(), b = plain.fill_inputs[i].data();
            identical = std::equal(a.begin(), a.end(), b.begin(), b.end());
        }
        const auto ya = forced.y_p.data(), yb = plain.y_p.data();
        identical = identical && std::equal(ya.begin(), ya.end(), yb.begin(), yb.end());
        c.check(identical, "masks forced to 1 reproduce baseline dec-fill inputs bit-for-bit (" + to_string(mode) + ")");
    }
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria A1..A7"};
    std::vector<std::string> allow_red;
    app.add_option("--allow-red", allow_red, "criteria whose failure does not fail the exit status")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    const std::set<std::string> allowed(allow_red.begin(), allow_red.end());

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Criterion> results;
    const auto emit = [&](Criterion c) {
        report(c);
        results.push_back(std::move(c));
    };

    const auto suite = acceptance::run_gradient_suite(kGradSeed);
    emit(a1_gradients(suite));
    emit(a2_architecture());

    const auto overfit_data = synth_samples(SynthConfig{}, kOverfitDataSeed, kOverfitSamples);
    const auto nn = overfit(UpsampleMode::nn_conv, overfit_data);
    const auto deconv = overfit(UpsampleMode::deconv, overfit_data);
    auto a3 = a3_overfit(nn);
    a3.info(fmt("deconv mode: L1 %.4f, IoU %.3f, finite %s (%.0f s)", deconv.l1, deconv.iou,
                deconv.finite ? "yes" : "no", deconv.seconds));
    emit(std::move(a3));

    double full_l1 = 0, base_l1 = 0;
    std::vector<Tensor> ablation_masks;
    emit(a4_ablation(full_l1, base_l1, ablation_masks));

    const SynthConfig synth;
    emit(a5_identities({{"A3 nn_conv model", predict(nn.state.g, overfit_data).masks},
                        {"A3 deconv model", predict(deconv.state.g, overfit_data).masks},
                        {"A4 full model", ablation_masks}},
                       {overfit_data, synth_samples(synth, kAblationTrainSeed, kAblationTrain),
                        synth_samples(synth, kAblationTestSeed, kAblationTest)}));
    emit(a6_determinism(nn.state));
    emit(a7_mode_parity(suite, nn, deconv, overfit_data));

    int red = 0, blocking = 0;
    std::printf("\n");
    for (const auto& c : results) {
        if (c.passed) {
            if (allowed.count(c.id)) std::printf("note: %s is listed in --allow-red but passed\n", c.id.c_str());
            continue;
        }
        ++red;
        if (!allowed.count(c.id)) ++blocking;
    }
    std::printf("%zu/%zu criteria passed, %d failed (%d not covered by --allow-red), %.0f s\n", results.size() - red,
                results.size(), red, blocking, seconds_since(t0));
    return blocking == 0 ? 0 : 1;
}
