#include "neglectnet/generator.hpp"

#include "init.hpp"
#include "neglectnet/ops.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

std::string pname(const char* block, int layer, const char* what)
{
    return std::string(block) + "." + std::to_string(layer) + "." + what;
}

// Output channels of decoder layer i: the width of encoder layer i-1, or the
// head channel count at layer 1.
int decoder_out_channels(const NetConfig& c, int layer, int head_channels)
{
    return layer == 1 ? head_channels : c.width(layer - 1);
}

// Input channels of decoder layer i: the deepest layer sees e_depth alone,
// every other layer a concat of the layer above (width(i)) and the skip (width(i)).
int decoder_in_channels(const NetConfig& c, int layer)
{
    return layer == c.depth ? c.width(layer) : 2 * c.width(layer);
}

Tensor norm_act(const ParamStore& p, const std::string& prefix, const Tensor& h, const NetConfig& c, bool leaky)
{
    auto n = instance_norm(h, p.at(prefix + "gamma"), p.at(prefix + "beta"), c.norm_eps);
    return leaky ? leaky_relu(n, c.leaky_slope) : relu(n);
}

void check_feats(const GeneratorParams& g, const std::vector<Tensor>& feats)
{
    if (static_cast<int>(feats.size()) != g.config.depth)
        throw DimensionError("expected " + std::to_string(g.config.depth) + " encoder features, got " +
                             std::to_string(feats.size()));
}

}  // namespace

GeneratorParams build_generator(const NetConfig& config, uint64_t seed)
{
    config.validate();
    GeneratorParams g{config, {}};
    Rng rng(seed);
    auto& p = g.params;
    const int d = config.depth;

    for (int i = 1; i <= d; ++i) {
        const int in = i == 1 ? config.in_channels : config.width(i - 1);
        const int out = config.width(i);
        p.add(pname("enc", i, "weight"), init::gaussian({out, in, 4, 4}, rng));
        p.add(pname("enc", i, "gamma"), init::ones(out));
        p.add(pname("enc", i, "beta"), init::zeros(out));
    }

    if (config.use_neglect_branch) {
        for (int i = d; i >= 1; --i) {
            const int in = decoder_in_channels(config, i);
            const int out = decoder_out_channels(config, i, 1);
            p.add(pname("seg", i, "weight"), init::gaussian({in, out, 4, 4}, rng));
            if (i == 1) {
                p.add(pname("seg", i, "bias"), init::zeros(out));
            } else {
                p.add(pname("seg", i, "gamma"), init::ones(out));
                p.add(pname("seg", i, "beta"), init::zeros(out));
            }
        }
        for (int i = d; i >= 1; --i) {
            p.add(pname("neglect", i, "weight"), init::gaussian({1, decoder_in_channels(config, i), 1, 1}, rng));
            p.add(pname("neglect", i, "bias"), init::zeros(1));
        }
    }

    for (int i = d; i >= 1; --i) {
        const int in = decoder_in_channels(config, i);
        const int out = decoder_out_channels(config, i, 3);
        if (config.upsample_mode == UpsampleMode::nn_conv)
            p.add(pname("fill", i, "weight"), init::gaussian({out, in, 3, 3}, rng));
        else
            p.add(pname("fill", i, "weight"), init::gaussian({in, out, 4, 4}, rng));
        if (i == 1) {
            p.add(pname("fill", i, "bias"), init::zeros(out));
        } else {
            p.add(pname("fill", i, "gamma"), init::ones(out));
            p.add(pname("fill", i, "beta"), init::zeros(out));
        }
    }
    return g;
}

std::vector<Tensor> encoder_forward(const GeneratorParams& g, const Tensor& x)
{
    const auto& c = g.config;
    if (x.rank() != 4 || x.dim(1) != c.in_channels || x.dim(2) != c.image_h || x.dim(3) != c.image_w)
        throw DimensionError("generator input " + shape_to_string(x.shape()) + " does not match B x " +
                             std::to_string(c.in_channels) + " x " + std::to_string(c.image_h) + " x " +
                             std::to_string(c.image_w));
    std::vector<Tensor> feats;
    feats.reserve(static_cast<size_t>(c.depth));
    Tensor h = x;
    for (int i = 1; i <= c.depth; ++i) {
        h = conv2d(h, g.params.at(pname("enc", i, "weight")), Tensor(), 2, 1);
        h = norm_act(g.params, pname("enc", i, ""), h, c, true);
        feats.push_back(h);
    }
    return feats;
}

SegDecoderOutput dec_seg_forward(const GeneratorParams& g, const std::vector<Tensor>& encoder_feats)
{
    const auto& c = g.config;
    if (!c.use_neglect_branch) throw ConfigError("dec-seg is not part of the baseline generator");
    check_feats(g, encoder_feats);
    SegDecoderOutput out;
    out.outputs.resize(static_cast<size_t>(c.depth));
    Tensor above;
    for (int i = c.depth; i >= 1; --i) {
        const Tensor& skip = encoder_feats[static_cast<size_t>(i - 1)];
        const Tensor in = i == c.depth ? skip : concat_channels(above, skip);
        const Tensor& w = g.params.at(pname("seg", i, "weight"));
        if (i == 1) {
            above = conv_transpose2d(in, w, g.params.at(pname("seg", i, "bias")), 2, 1);
        } else {
            above = norm_act(g.params, pname("seg", i, ""), conv_transpose2d(in, w, Tensor(), 2, 1), c, false);
        }
        out.outputs[static_cast<size_t>(i - 1)] = above;
    }
    out.z_p = sigmoid(above);
    return out;
}

NeglectResult neglect_node(const GeneratorParams& g, int layer, const Tensor& encoder_feat, const Tensor& seg_above,
                           MaskOverride mask_override)
{
    const Tensor in = seg_above.defined() ? concat_channels(encoder_feat, seg_above) : encoder_feat;
    NeglectResult r;
    if (mask_override == MaskOverride::none) {
        r.mask = sigmoid(conv2d(in, g.params.at(pname("neglect", layer, "weight")),
                                g.params.at(pname("neglect", layer, "bias")), 1, 0));
    } else {
        const Real v = mask_override == MaskOverride::ones ? Real(1) : Real(0);
        r.mask = Tensor::full({encoder_feat.dim(0), 1, encoder_feat.dim(2), encoder_feat.dim(3)}, v);
    }
    r.gated = mul(r.mask, encoder_feat);
    return r;
}

FillDecoderOutput dec_fill_forward(const GeneratorParams& g, const std::vector<Tensor>& encoder_feats,
                                   const std::vector<Tensor>& seg_outputs, const ForwardOptions& options)
{
    const auto& c = g.config;
    check_feats(g, encoder_feats);
    if (c.use_neglect_branch && static_cast<int>(seg_outputs.size()) != c.depth)
        throw DimensionError("dec-fill needs one dec-seg output per layer");

    FillDecoderOutput out;
    out.layer_inputs.resize(static_cast<size_t>(c.depth));
    if (c.use_neglect_branch) out.neglect_masks.resize(static_cast<size_t>(c.depth));
    Tensor above;
    for (int i = c.depth; i >= 1; --i) {
        const Tensor& e = encoder_feats[static_cast<size_t>(i - 1)];
        Tensor skip = e;
        if (c.use_neglect_branch) {
            const Tensor seg_above = i == c.depth ? Tensor() : seg_outputs[static_cast<size_t>(i)];
            auto node = neglect_node(g, i, e, seg_above, options.mask_override);
            out.neglect_masks[static_cast<size_t>(i - 1)] = node.mask;
            skip = node.gated;
        }
        const Tensor in = i == c.depth ? skip : concat_channels(above, skip);
        out.layer_inputs[static_cast<size_t>(i - 1)] = in;

        const Tensor& w = g.params.at(pname("fill", i, "weight"));
        const Tensor bias = i == 1 ? g.params.at(pname("fill", i, "bias")) : Tensor();
        Tensor h = c.upsample_mode == UpsampleMode::nn_conv ? conv2d(upsample_nearest(in, 2), w, bias, 1, 1)
                                                            : conv_transpose2d(in, w, bias, 2, 1);
        above = i == 1 ? h : norm_act(g.params, pname("fill", i, ""), h, c, false);
    }
    out.y_p = tanh(above);
    return out;
}

GeneratorOutput generator_forward(const GeneratorParams& g, const Tensor& x, const ForwardOptions& options)
{
    const auto feats = encoder_forward(g, x);
    GeneratorOutput out;
    std::vector<Tensor> seg_outputs;
    if (g.config.use_neglect_branch) {
        auto seg = dec_seg_forward(g, feats);
        out.z_p = seg.z_p;
        seg_outputs = std::move(seg.outputs);
    }
    auto fill = dec_fill_forward(g, feats, seg_outputs, options);
    out.y_p = fill.y_p;
    out.neglect_masks = std::move(fill.neglect_masks);
    out.fill_inputs = std::move(fill.layer_inputs);
    return out;
}

}  // namespace neglectnet
