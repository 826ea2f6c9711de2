#pragma once

#include <cstdint>
#include <vector>

#include "neglectnet/net_config.hpp"
#include "neglectnet/params.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// Learnable state of the two-branch generator.
///
/// Parameter names, with i the 1-based layer index:
///   enc.i.{weight,gamma,beta}     4x4 stride-2 conv, instance norm
///   seg.i.{weight,gamma,beta}     4x4 stride-2 transposed conv (i >= 2)
///   seg.1.{weight,bias}           1-channel head
///   neglect.i.{weight,bias}       1x1 conv producing the neglect mask
///   fill.i.{weight,gamma,beta}    upsample + 3x3 conv, or transposed conv
///   fill.1.{weight,bias}          3-channel head
/// The baseline configuration has no seg.* or neglect.* entries.
struct GeneratorParams {
    NetConfig config;
    ParamStore params;
};

/// Weights ~ N(0, 0.02), biases 0, gamma 1, beta 0. Convolutions feeding an
/// instance norm carry no bias.
GeneratorParams build_generator(const NetConfig& config, uint64_t seed);

/// Test hook: replaces every neglect mask with a constant.
enum class MaskOverride { none, ones, zeros };

struct ForwardOptions {
    MaskOverride mask_override = MaskOverride::none;
};

struct SegDecoderOutput {
    Tensor z_p;                   // B x 1 x H x W, sigmoid
    std::vector<Tensor> outputs;  // outputs[i-1] = output of dec-seg layer i (outputs[0] is pre-sigmoid)
};

struct NeglectResult {
    Tensor mask;   // B x 1 x h x w, strictly in (0, 1)
    Tensor gated;  // mask (broadcast) * encoder feature
};

struct FillDecoderOutput {
    Tensor y_p;                        // B x 3 x H x W, tanh
    std::vector<Tensor> neglect_masks; // masks[i-1] at scale H / 2^i
    std::vector<Tensor> layer_inputs;  // layer_inputs[i-1] = input tensor of dec-fill layer i
};

struct GeneratorOutput {
    Tensor z_p;  // undefined in baseline mode
    Tensor y_p;
    std::vector<Tensor> neglect_masks;
    std::vector<Tensor> fill_inputs;
};

/// Feature maps e_1..e_depth (index i-1 holds e_i).
std::vector<Tensor> encoder_forward(const GeneratorParams& g, const Tensor& x);

SegDecoderOutput dec_seg_forward(const GeneratorParams& g, const std::vector<Tensor>& encoder_feats);

/// Neglect node of layer i. `seg_above` is the output of dec-seg layer i+1,
/// or an undefined tensor at the deepest layer.
NeglectResult neglect_node(const GeneratorParams& g, int layer, const Tensor& encoder_feat, const Tensor& seg_above,
                           MaskOverride mask_override = MaskOverride::none);

/// In baseline mode `seg_outputs` is ignored and the raw encoder features
/// are used as skips.
FillDecoderOutput dec_fill_forward(const GeneratorParams& g, const std::vector<Tensor>& encoder_feats,
                                   const std::vector<Tensor>& seg_outputs, const ForwardOptions& options = {});

GeneratorOutput generator_forward(const GeneratorParams& g, const Tensor& x, const ForwardOptions& options = {});

}  // namespace neglectnet
