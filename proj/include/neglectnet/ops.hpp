#pragma once

#include "neglectnet/tensor.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// Lower bound applied inside log() so saturated sigmoids cannot yield -inf.
inline constexpr Real kLogFloor = Real(1e-12);

// Convolutions over B x C x H x W images. `bias` may be an undefined Tensor.
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride, int padding);

/// weight is C_in x C_out x K x K; output extent is (H-1)*stride - 2*padding + K.
Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride, int padding);

Tensor upsample_nearest(const Tensor& input, int factor);

/// Per-sample, per-channel normalization over the spatial extent.
Tensor instance_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta, Real eps);

Tensor leaky_relu(const Tensor& input, Real slope);
Tensor relu(const Tensor& input);
Tensor sigmoid(const Tensor& input);
Tensor tanh(const Tensor& input);

Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor slice_channels(const Tensor& input, int64_t start, int64_t count);

// Pointwise arithmetic. Shapes must match, except that a single-channel
// B x 1 x H x W operand broadcasts over the channels of a B x C x H x W one.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
/// scale * a + shift
Tensor affine(const Tensor& a, Real scale, Real shift);
Tensor log(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Mean over every axis except the first; result has shape {B}.
Tensor mean_per_sample(const Tensor& a);
/// Scalar mean absolute difference.
Tensor l1_distance(const Tensor& a, const Tensor& b);

/// Concatenates along the batch axis; not differentiable.
Tensor stack_batch(const std::vector<Tensor>& items);
/// Item `index` of the batch as a 1 x ... tensor; not differentiable.
Tensor batch_item(const Tensor& batch, int64_t index);

}  // namespace neglectnet
