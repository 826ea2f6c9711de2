#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "gradcheck_runner.hpp"
#include "neglectnet/checkpoint.hpp"
#include "neglectnet/metrics.hpp"
#include "neglectnet/ops.hpp"
#include "run_config.hpp"

namespace neglectnet::cli {
namespace fs = std::filesystem;
namespace {

struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags)
{
    cmd->add_option("--config", flags.config_file, "flat JSON configuration file");
    for (const auto& key : config_keys())
        cmd->add_option("--" + key.name, flags.values[key.name], key.help);
}

// defaults <- config file <- command-line flags. Without --config, eval and
// infer pick up <out_dir>/config.json written by train.
RunConfig resolve(CLI::App* cmd, const ConfigFlags& flags, bool read_run_config)
{
    RunConfig cfg;
    const auto given = [&](const std::string& key) { return cmd->count("--" + key) > 0; };
    if (!flags.config_file.empty()) {
        cfg.load_file(flags.config_file);
    } else if (read_run_config) {
        const std::string out_dir = given("out_dir") ? flags.values.at("out_dir") : cfg.out_dir;
        const auto echoed = fs::path(out_dir) / "config.json";
        if (fs::exists(echoed)) cfg.load_file(echoed.string());
    }
    for (const auto& key : config_keys())
        if (given(key.name)) cfg.set(key.name, flags.values.at(key.name));
    cfg.validate();
    return cfg;
}

// Drops log rows written after the checkpoint a run resumes from.
void truncate_log(const fs::path& path, int64_t last_step)
{
    std::ifstream in(path);
    if (!in) return;
    std::string line, kept;
    bool header = true;
    while (std::getline(in, line)) {
        if (header || std::stoll(line.substr(0, line.find(','))) <= last_step) kept += line + '\n';
        header = false;
    }
    in.close();
    std::ofstream(path, std::ios::trunc) << kept;
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

int cmd_synth(const RunConfig& cfg)
{
    if (cfg.n < 1) throw ArgumentError("n must be >= 1");
    make_dataset(cfg.synth, cfg.train.seed, cfg.n, cfg.data_dir, cfg.split);
    const auto dir = fs::path(cfg.data_dir) / cfg.split;
    cfg.save_file((dir / "config.json").string());
    std::cout << "wrote " << cfg.n << " samples (" << 3 * cfg.n << " images) to " << dir.string() << '\n';
    return 0;
}

std::vector<Sample> load_split(const RunConfig& cfg)
{
    auto samples = load_dataset(cfg.data_dir, cfg.split);
    for (const auto& s : samples)
        if (s.x.height != cfg.train.net.image_h || s.x.width != cfg.train.net.image_w)
            throw ConfigError("dataset images are " + std::to_string(s.x.width) + "x" + std::to_string(s.x.height) +
                              " but image_size is " + std::to_string(cfg.train.net.image_h));
    return samples;
}

int cmd_train(const RunConfig& cfg)
{
    const auto data = load_split(cfg);
    ensure_dir(cfg.out_dir);
    const std::string ckpt = cfg.checkpoint_path();
    const auto log_path = fs::path(cfg.out_dir) / "train_log.csv";

    TrainState state = init_training(cfg.train);
    if (cfg.resume) {
        load_checkpoint(ckpt, state);
        truncate_log(log_path, state.step);
        std::cout << "resuming from step " << state.step << '\n';
    }
    cfg.save_file((fs::path(cfg.out_dir) / "config.json").string());
    if (!cfg.resume) save_checkpoint(ckpt, state);

    const bool fresh_log = !cfg.resume || !fs::exists(log_path);
    std::ofstream log(log_path, fresh_log ? std::ios::trunc : std::ios::app);
    if (!log) throw IoError("cannot write " + log_path.string());
    if (fresh_log) log << TrainReport::csv_header() << '\n' << std::flush;

    const int64_t every = std::max<int64_t>(1, cfg.train.steps / 20);
    TrainHooks hooks;
    hooks.on_step = [&](const StepRecord& r) {
        log << TrainReport::csv_row(r) << '\n' << std::flush;
        if (r.step % every == 0 || r.step == cfg.train.steps)
            std::printf("step %6lld  l_g %9.4f  l1_y %.4f  l1_z %.4f  l_d %.4f  D(real) %.3f  D(fake) %.3f\n",
                        static_cast<long long>(r.step), r.l_g, r.l1_y, r.l1_z, r.l_d, r.d_real, r.d_fake);
    };
    hooks.on_checkpoint = [&](const TrainState& s) { save_checkpoint(ckpt, s); };
    train(state, cfg.train, data, hooks);
    save_checkpoint(ckpt, state);
    std::cout << "checkpoint " << ckpt << " at step " << state.step << '\n';
    return 0;
}

void print_metrics(const EvalResult& r)
{
    std::printf("n %lld  l1_pct %.4f  psnr_db %.3f  ssim %.4f", static_cast<long long>(r.n_samples), r.l1_pct,
                r.psnr_db, r.ssim);
    if (r.has_mask()) std::printf("  mask_iou %.4f", r.mask_iou);
    std::printf("\n");
}

int cmd_eval(const RunConfig& cfg)
{
    const auto data = load_split(cfg);
    EvalResult r;
    if (cfg.ground_truth) {
        std::vector<Image> ys, zs;
        for (const auto& s : data) {
            ys.push_back(s.y);
            zs.push_back(s.z);
        }
        r = evaluate_predictions(ys, ys, zs, zs);
    } else {
        r = evaluate(load_generator(cfg.checkpoint_path(), cfg.train.net), data, cfg.eval_batch);
    }
    const fs::path report = cfg.report_path();
    if (report.has_parent_path()) ensure_dir(report.parent_path());
    write_eval_csv(report.string(), r);
    print_metrics(r);
    std::cout << "report " << report.string() << '\n';
    return 0;
}

Image center_crop(const Image& im, int h, int w)
{
    Image out(im.channels, h, w);
    const int oy = (im.height - h) / 2, ox = (im.width - w) / 2;
    for (int c = 0; c < im.channels; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.at(c, y, x) = im.at(c, oy + y, ox + x);
    return out;
}

Image upsample_for_view(const Image& mask, int factor)
{
    Image out(1, mask.height * factor, mask.width * factor);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) out.at(0, y, x) = mask.at(0, y / factor, x / factor);
    return out;
}

// x | z_p | y_p | |x - y_p|, every tile in [0, 1].
Image make_panel(const Image& x, const Image* z, const Image& y)
{
    const int h = x.height, w = x.width;
    Image panel(3, h, 4 * w);
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < h; ++r)
            for (int col = 0; col < w; ++col) {
                panel.at(c, r, col) = (x.at(c, r, col) + 1) / 2;
                panel.at(c, r, w + col) = z ? z->at(0, r, col) : Real(0);
                panel.at(c, r, 2 * w + col) = (y.at(c, r, col) + 1) / 2;
                panel.at(c, r, 3 * w + col) = std::min<Real>(1, std::abs(x.at(c, r, col) - y.at(c, r, col)) / 2);
            }
    return panel;
}

int cmd_infer(const RunConfig& cfg)
{
    if (cfg.input.empty()) throw ArgumentError("infer needs --input <image.png>");
    Image x = read_png(cfg.input, true);
    if (x.channels == 1) {
        Image rgb(3, x.height, x.width);
        for (int c = 0; c < 3; ++c)
            std::copy(x.data.begin(), x.data.end(), rgb.data.begin() + static_cast<std::ptrdiff_t>(c) * x.data.size());
        x = std::move(rgb);
    }
    const int unit = 1 << cfg.train.net.depth;
    const int h = x.height / unit * unit, w = x.width / unit * unit;
    if (h == 0 || w == 0) throw ArgumentError("input is smaller than 2^depth pixels");
    if (h != x.height || w != x.width) {
        std::cerr << "warning: center-cropping " << x.width << "x" << x.height << " input to " << w << "x" << h
                  << " (dimensions must be multiples of " << unit << ")\n";
        x = center_crop(x, h, w);
    }
    NetConfig net = cfg.train.net;
    net.image_h = h;
    net.image_w = w;
    GeneratorParams g = load_generator(cfg.checkpoint_path(), cfg.train.net);
    g.config = net;

    NoGradGuard no_grad;
    const GeneratorOutput out = generator_forward(g, to_tensor(x));
    const auto dir = fs::path(cfg.out_dir) / "infer";
    ensure_dir(dir);
    const Image y = to_image(out.y_p);
    write_png((dir / "x.png").string(), x, true);
    write_png((dir / "y_p.png").string(), y, true);
    Image z;
    if (out.z_p.defined()) {
        z = to_image(out.z_p);
        write_png((dir / "z_p.png").string(), z, false);
    }
    for (size_t i = 0; i < out.neglect_masks.size(); ++i) {
        const int level = static_cast<int>(i) + 1;
        write_png((dir / ("neglect_mask_" + std::to_string(level) + ".png")).string(),
                  upsample_for_view(to_image(out.neglect_masks[i]), 1 << level), false);
    }
    write_png((dir / "panel.png").string(), make_panel(x, out.z_p.defined() ? &z : nullptr, y), false);
    std::cout << "wrote " << (3 + out.neglect_masks.size() + (out.z_p.defined() ? 1 : 0)) << " images to "
              << dir.string() << '\n';
    return 0;
}

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Joint foreground segmentation and background inpainting GAN"};
    app.require_subcommand(1);

    ConfigFlags synth_flags, train_flags, eval_flags, infer_flags;
    auto* synth = app.add_subcommand("synth", "write a procedural dataset split");
    add_config_flags(synth, synth_flags);
    auto* train_cmd = app.add_subcommand("train", "train generator and discriminator");
    add_config_flags(train_cmd, train_flags);
    auto* eval = app.add_subcommand("eval", "score a checkpoint on a dataset split");
    add_config_flags(eval, eval_flags);
    auto* infer = app.add_subcommand("infer", "run a checkpoint on one image");
    add_config_flags(infer, infer_flags);

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every gradient");
    std::string precision = "f64";
    bool inject_fault = false;
    uint64_t gc_seed = 1;
    gradcheck->add_option("--precision", precision, "f64 (diagnostic core) or f32")
        ->check(CLI::IsMember({"f32", "f64"}));
    gradcheck->add_flag("--inject-fault", inject_fault, "add a case with a deliberately wrong backward rule");
    gradcheck->add_option("--seed", gc_seed, "seed of the random inputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*synth) return cmd_synth(resolve(synth, synth_flags, false));
        if (*train_cmd) return cmd_train(resolve(train_cmd, train_flags, false));
        if (*eval) return cmd_eval(resolve(eval, eval_flags, true));
        if (*infer) return cmd_infer(resolve(infer, infer_flags, true));
        if (*gradcheck) {
#ifdef NEGLECTNET_HAVE_F64
            const bool ok = precision == "f64" ? run_gradcheck_f64(gc_seed, inject_fault, std::cout)
                                               : run_gradcheck_f32(gc_seed, inject_fault, std::cout);
#else
            if (precision == "f64") throw ConfigError("this build has no 64-bit core; use --precision f32");
            const bool ok = run_gradcheck_f32(gc_seed, inject_fault, std::cout);
#endif
            return ok ? 0 : 1;
        }
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << " (training aborted; the last checkpoint is kept)\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace neglectnet::cli
