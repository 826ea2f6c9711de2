#include "run_config.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace neglectnet::cli {
namespace {

using nlohmann::json;

struct Field {
    KeyInfo info;
    std::function<json(const RunConfig&)> get;
    std::function<void(RunConfig&, const json&)> set;
};

template <typename T>
T as(const json& v, const std::string& key)
{
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (v.is_string()) {
                const auto s = v.get<std::string>();
                if (s == "true" || s == "1") return true;
                if (s == "false" || s == "0") return false;
                throw ConfigError("");
            }
            return v.get<bool>();
        } else if constexpr (std::is_arithmetic_v<T>) {
            if (v.is_string()) {
                const auto s = v.get<std::string>();
                size_t used = 0;
                T out{};
                if constexpr (std::is_integral_v<T>)
                    out = static_cast<T>(std::stoll(s, &used));
                else
                    out = static_cast<T>(std::stod(s, &used));
                if (used != s.size()) throw ConfigError("");
                return out;
            }
            if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw ConfigError("");
            } else if (!v.is_number()) {
                throw ConfigError("");
            }
            return v.get<T>();
        } else {
            return v.get<T>();
        }
    } catch (const std::exception&) {
        throw ConfigError("invalid value " + v.dump() + " for key '" + key + "'");
    }
}

#define NN_FIELD(key, help, expr, type)                                                              \
    Field                                                                                            \
    {                                                                                                \
        {key, help}, [](const RunConfig& c) { return json(c.expr); },                                \
            [](RunConfig& c, const json& v) { c.expr = static_cast<std::remove_cvref_t<decltype(c.expr)>>(as<type>(v, key)); } \
    }

const std::vector<Field>& fields()
{
    static const std::vector<Field> all = {
        // architecture
        NN_FIELD("depth", "encoder stages", train.net.depth, int),
        NN_FIELD("base_width", "kernels in the first encoder stage", train.net.base_width, int),
        NN_FIELD("max_width", "cap on kernels per stage", train.net.max_width, int),
        {{"mode", "full (two branches with neglect nodes) or baseline (encoder + dec-fill)"},
         [](const RunConfig& c) { return json(c.train.net.use_neglect_branch ? "full" : "baseline"); },
         [](RunConfig& c, const json& v) {
             const auto s = as<std::string>(v, "mode");
             if (s != "full" && s != "baseline") throw ConfigError("mode must be full or baseline, got '" + s + "'");
             c.train.net.use_neglect_branch = s == "full";
         }},
        {{"upsample_mode", "dec-fill upsampling: nn_conv or deconv"},
         [](const RunConfig& c) { return json(to_string(c.train.net.upsample_mode)); },
         [](RunConfig& c, const json& v) {
             c.train.net.upsample_mode = parse_upsample_mode(as<std::string>(v, "upsample_mode"));
         }},
        {{"image_size", "image height and width"},
         [](const RunConfig& c) { return json(c.train.net.image_h); },
         [](RunConfig& c, const json& v) {
             const int s = as<int>(v, "image_size");
             c.train.net.image_h = c.train.net.image_w = s;
             c.synth.height = c.synth.width = s;
         }},
        NN_FIELD("leaky_slope", "negative slope of the encoder activations", train.net.leaky_slope, double),
        NN_FIELD("norm_eps", "instance-norm epsilon", train.net.norm_eps, double),
        NN_FIELD("disc_depth", "discriminator stages", train.net.disc_depth, int),
        // optimization
        NN_FIELD("lambda_f", "weight of the background L1 term", train.weights.lambda_f, double),
        NN_FIELD("lambda_s", "weight of the mask L1 term", train.weights.lambda_s, double),
        NN_FIELD("steps", "total training steps", train.steps, int64_t),
        NN_FIELD("batch_size", "samples per step", train.batch_size, int),
        NN_FIELD("lr", "generator learning rate (discriminator uses half)", train.lr, double),
        NN_FIELD("beta1", "Adam beta1", train.beta1, double),
        NN_FIELD("beta2", "Adam beta2", train.beta2, double),
        NN_FIELD("adam_eps", "Adam epsilon", train.adam_eps, double),
        NN_FIELD("augment", "apply flip / crop / color jitter while training", train.augment, bool),
        NN_FIELD("checkpoint_every", "steps between checkpoints (0: final only)", train.checkpoint_every, int64_t),
        NN_FIELD("seed", "seed of every random stream", train.seed, uint64_t),
        // data synthesis
        NN_FIELD("n", "samples written by synth", n, int64_t),
        NN_FIELD("fg_min_frac", "smallest foreground box side / image side", synth.fg_min_frac, double),
        NN_FIELD("fg_max_frac", "largest foreground box side / image side", synth.fg_max_frac, double),
        NN_FIELD("max_margin_frac", "largest margin / larger foreground box side", synth.max_margin_frac, double),
        NN_FIELD("supersample", "anti-aliasing samples per pixel side", synth.supersample, int),
        NN_FIELD("bg_gradient", "weight of gradient backgrounds", synth.background_mix[0], double),
        NN_FIELD("bg_noise", "weight of value-noise backgrounds", synth.background_mix[1], double),
        NN_FIELD("bg_shapes", "weight of shape-collage backgrounds", synth.background_mix[2], double),
        NN_FIELD("fg_glyph", "weight of glyph-stroke foregrounds", synth.foreground_mix[0], double),
        NN_FIELD("fg_polygon", "weight of polygon foregrounds", synth.foreground_mix[1], double),
        NN_FIELD("fg_blob", "weight of blob foregrounds", synth.foreground_mix[2], double),
        NN_FIELD("flip_prob", "probability of a horizontal flip", train.augment_config.flip_prob, double),
        NN_FIELD("crop_min", "smallest crop side before resizing back", train.augment_config.crop_min, double),
        NN_FIELD("brightness", "largest additive color shift", train.augment_config.brightness, double),
        NN_FIELD("contrast", "largest relative gain change", train.augment_config.contrast, double),
        // files
        NN_FIELD("data_dir", "dataset root", data_dir, std::string),
        NN_FIELD("split", "dataset split", split, std::string),
        NN_FIELD("out_dir", "run directory (config, log, checkpoint, reports)", out_dir, std::string),
        NN_FIELD("checkpoint", "checkpoint file (default <out_dir>/checkpoint.bin)", checkpoint, std::string),
        NN_FIELD("input", "input image for infer", input, std::string),
        NN_FIELD("report", "metrics CSV (default <out_dir>/eval_<split>.csv)", report, std::string),
        NN_FIELD("resume", "continue from the checkpoint in out_dir", resume, bool),
        NN_FIELD("ground_truth", "eval scores the ground truth against itself", ground_truth, bool),
        NN_FIELD("eval_batch", "samples per forward pass in eval", eval_batch, int),
    };
    return all;
}

#undef NN_FIELD

const Field& field(const std::string& key)
{
    static const auto index = [] {
        std::map<std::string, const Field*> m;
        for (const auto& f : fields()) m[f.info.name] = &f;
        return m;
    }();
    auto it = index.find(key);
    if (it == index.end()) throw ConfigError("unknown configuration key '" + key + "'");
    return *it->second;
}

}  // namespace

RunConfig::RunConfig()
{
    train.net.depth = 4;
    train.net.base_width = 8;
    train.net.image_h = train.net.image_w = 32;
    synth.height = synth.width = 32;
    train.steps = 1000;
    train.checkpoint_every = 100;
}

std::string RunConfig::checkpoint_path() const
{
    return checkpoint.empty() ? (std::filesystem::path(out_dir) / "checkpoint.bin").string() : checkpoint;
}

std::string RunConfig::report_path() const
{
    return report.empty() ? (std::filesystem::path(out_dir) / ("eval_" + split + ".csv")).string() : report;
}

void RunConfig::set(const std::string& key, const std::string& value) { field(key).set(*this, json(value)); }

std::string RunConfig::get(const std::string& key) const
{
    const json v = field(key).get(*this);
    return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string RunConfig::to_json() const
{
    json out = json::object();
    for (const auto& f : fields()) out[f.info.name] = f.get(*this);
    // keep documentation order rather than nlohmann's sorted order
    std::ostringstream s;
    s << "{\n";
    for (size_t i = 0; i < fields().size(); ++i) {
        const auto& name = fields()[i].info.name;
        s << "  " << json(name).dump() << ": " << out[name].dump() << (i + 1 < fields().size() ? ",\n" : "\n");
    }
    s << "}\n";
    return s.str();
}

void RunConfig::merge_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("configuration must be a flat JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (value.is_object() || value.is_array()) throw ConfigError("configuration key '" + key + "' must be a scalar");
        field(key).set(*this, value);
    }
}

void RunConfig::load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration " + path);
    std::stringstream s;
    s << in.rdbuf();
    merge_json(s.str());
}

void RunConfig::save_file(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << to_json();
    if (!out) throw IoError("failed writing " + path);
}

void RunConfig::validate() const
{
    train.validate();
    synth.validate();
    if (synth.height != train.net.image_h || synth.width != train.net.image_w)
        throw ConfigError("synthesis and network image sizes differ");
    if (eval_batch < 1) throw ConfigError("eval_batch must be >= 1");
}

const std::vector<KeyInfo>& config_keys()
{
    static const std::vector<KeyInfo> keys = [] {
        std::vector<KeyInfo> k;
        for (const auto& f : fields()) k.push_back(f.info);
        return k;
    }();
    return keys;
}

}  // namespace neglectnet::cli
