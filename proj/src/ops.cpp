#include "neglectnet/ops.hpp"

#include <algorithm>
#include <cmath>

#include "gemm.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {
namespace {

using detail::grad_buffer;
using detail::make_result;

void require_rank4(const Tensor& t, const char* what)
{
    if (!t.defined() || t.rank() != 4)
        throw DimensionError(std::string(what) + " expects a B x C x H x W tensor, got " +
                             (t.defined() ? shape_to_string(t.shape()) : std::string("undefined")));
}

void check_bias(const Tensor& bias, int64_t channels, const char* what)
{
    if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != channels))
        throw DimensionError(std::string(what) + ": bias shape " + shape_to_string(bias.shape()) + " does not match " +
                             std::to_string(channels) + " output channels");
}

template <class F>
Tensor unary(const char* name, const Tensor& a, F forward_and_derivative)
{
    const auto in = a.data();
    std::vector<Real> out(in.size());
    std::vector<Real> deriv(in.size());
    for (size_t i = 0; i < in.size(); ++i) forward_and_derivative(in[i], out[i], deriv[i]);
    return make_result(name, a.shape(), std::move(out), {a}, [a, deriv = std::move(deriv)](const TensorImpl& o) {
        if (!a.requires_grad()) return;
        auto& g = grad_buffer(a);
        for (size_t i = 0; i < g.size(); ++i) g[i] += o.grad[i] * deriv[i];
    });
}

// Channel broadcast bookkeeping for binary ops.
struct Broadcast {
    Shape out_shape;
    bool a_bcast = false;
    bool b_bcast = false;
    int64_t batch = 1, channels = 1, plane = 1;
};

Broadcast broadcast_shapes(const Tensor& a, const Tensor& b, const char* what)
{
    Broadcast r;
    if (a.shape() == b.shape()) {
        r.out_shape = a.shape();
        r.plane = a.numel();
        return r;
    }
    const bool rank_ok = a.rank() == 4 && b.rank() == 4;
    if (rank_ok && a.dim(0) == b.dim(0) && a.dim(2) == b.dim(2) && a.dim(3) == b.dim(3) &&
        (a.dim(1) == 1 || b.dim(1) == 1)) {
        r.a_bcast = a.dim(1) == 1;
        r.b_bcast = !r.a_bcast;
        r.out_shape = r.a_bcast ? b.shape() : a.shape();
        r.batch = r.out_shape[0];
        r.channels = r.out_shape[1];
        r.plane = r.out_shape[2] * r.out_shape[3];
        return r;
    }
    throw DimensionError(std::string(what) + ": incompatible shapes " + shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()));
}

// Maps an output flat index to the flat index of a (possibly broadcast) operand.
inline int64_t source_index(const Broadcast& r, bool bcast, int64_t i)
{
    if (!bcast) return i;
    const int64_t per_sample = r.channels * r.plane;
    return (i / per_sample) * r.plane + (i % r.plane);
}

enum class BinaryKind { add, sub, mul };

Tensor binary(const char* name, BinaryKind kind, const Tensor& a, const Tensor& b)
{
    const Broadcast r = broadcast_shapes(a, b, name);
    const int64_t n = shape_numel(r.out_shape);
    const auto ad = a.data();
    const auto bd = b.data();
    std::vector<Real> out(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        const Real x = ad[source_index(r, r.a_bcast, i)];
        const Real y = bd[source_index(r, r.b_bcast, i)];
        out[i] = kind == BinaryKind::add ? x + y : kind == BinaryKind::sub ? x - y : x * y;
    }
    return make_result(name, r.out_shape, std::move(out), {a, b}, [a, b, r, kind, n](const TensorImpl& o) {
        const auto ad = a.data();
        const auto bd = b.data();
        if (a.requires_grad()) {
            auto& ga = grad_buffer(a);
            for (int64_t i = 0; i < n; ++i) {
                const Real d = kind == BinaryKind::mul ? bd[source_index(r, r.b_bcast, i)] : Real(1);
                ga[source_index(r, r.a_bcast, i)] += o.grad[i] * d;
            }
        }
        if (b.requires_grad()) {
            auto& gb = grad_buffer(b);
            for (int64_t i = 0; i < n; ++i) {
                const Real d = kind == BinaryKind::mul   ? ad[source_index(r, r.a_bcast, i)]
                               : kind == BinaryKind::sub ? Real(-1)
                                                         : Real(1);
                gb[source_index(r, r.b_bcast, i)] += o.grad[i] * d;
            }
        }
    });
}

}  // namespace

// ---------------------------------------------------------------------------
// Convolutions

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride, int padding)
{
    require_rank4(input, "conv2d");
    require_rank4(weight, "conv2d weight");
    if (stride < 1) throw ArgumentError("conv2d: stride must be >= 1");
    if (padding < 0) throw ArgumentError("conv2d: padding must be >= 0");
    const int64_t batch = input.dim(0), channels = input.dim(1), h = input.dim(2), w = input.dim(3);
    const int64_t out_c = weight.dim(0), k = weight.dim(2);
    if (weight.dim(1) != channels)
        throw DimensionError("conv2d: input has " + std::to_string(channels) + " channels but weight expects " +
                             std::to_string(weight.dim(1)));
    if (weight.dim(3) != k) throw DimensionError("conv2d: kernel must be square");
    if (k > h + 2 * padding || k > w + 2 * padding) throw DimensionError("conv2d: kernel larger than padded input");
    check_bias(bias, out_c, "conv2d");

    const kernels::ConvGeometry g{channels, h, w, (h + 2 * padding - k) / stride + 1, (w + 2 * padding - k) / stride + 1,
                                  k, stride, padding};
    const int64_t rows = g.col_rows(), cols = g.col_cols();
    const int64_t in_size = channels * h * w, out_size = out_c * cols;

    std::vector<Real> out(static_cast<size_t>(batch * out_size), Real(0));
    std::vector<Real> col(static_cast<size_t>(rows * cols));
    for (int64_t b = 0; b < batch; ++b) {
        kernels::im2col(g, input.data().data() + b * in_size, col.data());
        Real* ob = out.data() + b * out_size;
        if (bias.defined())
            for (int64_t o = 0; o < out_c; ++o) std::fill(ob + o * cols, ob + (o + 1) * cols, bias[o]);
        kernels::gemm_nn(out_c, cols, rows, weight.data().data(), col.data(), ob);
    }

    std::vector<Tensor> inputs{input, weight};
    if (bias.defined()) inputs.push_back(bias);
    return make_result("conv2d", {batch, out_c, g.out_h, g.out_w}, std::move(out), std::move(inputs),
                       [input, weight, bias, g, batch, in_size, out_size](const TensorImpl& o) {
                           const int64_t rows = g.col_rows(), cols = g.col_cols();
                           const int64_t out_c = weight.dim(0);
                           std::vector<Real> col(static_cast<size_t>(rows * cols));
                           for (int64_t b = 0; b < batch; ++b) {
                               const Real* dout = o.grad.data() + b * out_size;
                               if (weight.requires_grad()) {
                                   kernels::im2col(g, input.data().data() + b * in_size, col.data());
                                   kernels::gemm_nt(out_c, rows, cols, dout, col.data(), grad_buffer(weight).data());
                               }
                               if (input.requires_grad()) {
                                   std::fill(col.begin(), col.end(), Real(0));
                                   kernels::gemm_tn(rows, cols, out_c, weight.data().data(), dout, col.data());
                                   kernels::col2im(g, col.data(), grad_buffer(input).data() + b * in_size);
                               }
                               if (bias.defined() && bias.requires_grad()) {
                                   auto& gb = grad_buffer(bias);
                                   for (int64_t oc = 0; oc < out_c; ++oc) {
                                       Real s = 0;
                                       for (int64_t j = 0; j < cols; ++j) s += dout[oc * cols + j];
                                       gb[oc] += s;
                                   }
                               }
                           }
                       });
}

Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride, int padding)
{
    require_rank4(input, "conv_transpose2d");
    require_rank4(weight, "conv_transpose2d weight");
    if (stride < 1) throw ArgumentError("conv_transpose2d: stride must be >= 1");
    if (padding < 0) throw ArgumentError("conv_transpose2d: padding must be >= 0");
    const int64_t batch = input.dim(0), channels = input.dim(1), h = input.dim(2), w = input.dim(3);
    if (weight.dim(0) != channels)
        throw DimensionError("conv_transpose2d: input has " + std::to_string(channels) +
                             " channels but weight expects " + std::to_string(weight.dim(0)));
    const int64_t out_c = weight.dim(1), k = weight.dim(2);
    if (weight.dim(3) != k) throw DimensionError("conv_transpose2d: kernel must be square");
    const int64_t oh = (h - 1) * stride - 2 * padding + k;
    const int64_t ow = (w - 1) * stride - 2 * padding + k;
    if (oh < 1 || ow < 1) throw DimensionError("conv_transpose2d: empty output");
    check_bias(bias, out_c, "conv_transpose2d");

    // The output image is the "input" side of the equivalent convolution.
    const kernels::ConvGeometry g{out_c, oh, ow, h, w, k, stride, padding};
    const int64_t rows = g.col_rows(), cols = g.col_cols();
    const int64_t in_size = channels * h * w, out_size = out_c * oh * ow;

    std::vector<Real> out(static_cast<size_t>(batch * out_size), Real(0));
    std::vector<Real> col(static_cast<size_t>(rows * cols));
    for (int64_t b = 0; b < batch; ++b) {
        std::fill(col.begin(), col.end(), Real(0));
        kernels::gemm_tn(rows, cols, channels, weight.data().data(), input.data().data() + b * in_size, col.data());
        Real* ob = out.data() + b * out_size;
        kernels::col2im(g, col.data(), ob);
        if (bias.defined())
            for (int64_t o = 0; o < out_c; ++o)
                for (int64_t j = 0; j < oh * ow; ++j) ob[o * oh * ow + j] += bias[o];
    }

    std::vector<Tensor> inputs{input, weight};
    if (bias.defined()) inputs.push_back(bias);
    return make_result("conv_transpose2d", {batch, out_c, oh, ow}, std::move(out), std::move(inputs),
                       [input, weight, bias, g, batch, in_size, out_size](const TensorImpl& o) {
                           const int64_t rows = g.col_rows(), cols = g.col_cols();
                           const int64_t channels = input.dim(1), out_c = g.channels;
                           const int64_t plane = g.height * g.width;
                           std::vector<Real> col(static_cast<size_t>(rows * cols));
                           for (int64_t b = 0; b < batch; ++b) {
                               const Real* dout = o.grad.data() + b * out_size;
                               kernels::im2col(g, dout, col.data());
                               if (input.requires_grad())
                                   kernels::gemm_nn(channels, cols, rows, weight.data().data(), col.data(),
                                                    grad_buffer(input).data() + b * in_size);
                               if (weight.requires_grad())
                                   kernels::gemm_nt(channels, rows, cols, input.data().data() + b * in_size,
                                                    col.data(), grad_buffer(weight).data());
                               if (bias.defined() && bias.requires_grad()) {
                                   auto& gb = grad_buffer(bias);
                                   for (int64_t oc = 0; oc < out_c; ++oc) {
                                       Real s = 0;
                                       for (int64_t j = 0; j < plane; ++j) s += dout[oc * plane + j];
                                       gb[oc] += s;
                                   }
                               }
                           }
                       });
}

Tensor upsample_nearest(const Tensor& input, int factor)
{
    require_rank4(input, "upsample_nearest");
    if (factor < 1) throw ArgumentError("upsample_nearest: factor must be >= 1, got " + std::to_string(factor));
    const int64_t planes = input.dim(0) * input.dim(1), h = input.dim(2), w = input.dim(3);
    const int64_t oh = h * factor, ow = w * factor;
    const auto in = input.data();
    std::vector<Real> out(static_cast<size_t>(planes * oh * ow));
    for (int64_t p = 0; p < planes; ++p)
        for (int64_t y = 0; y < oh; ++y)
            for (int64_t x = 0; x < ow; ++x) out[(p * oh + y) * ow + x] = in[(p * h + y / factor) * w + x / factor];
    return make_result("upsample_nearest", {input.dim(0), input.dim(1), oh, ow}, std::move(out), {input},
                       [input, planes, h, w, factor](const TensorImpl& o) {
                           if (!input.requires_grad()) return;
                           auto& g = grad_buffer(input);
                           const int64_t oh = h * factor, ow = w * factor;
                           for (int64_t p = 0; p < planes; ++p)
                               for (int64_t y = 0; y < oh; ++y)
                                   for (int64_t x = 0; x < ow; ++x)
                                       g[(p * h + y / factor) * w + x / factor] += o.grad[(p * oh + y) * ow + x];
                       });
}

Tensor instance_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta, Real eps)
{
    require_rank4(input, "instance_norm");
    const int64_t batch = input.dim(0), channels = input.dim(1), plane = input.dim(2) * input.dim(3);
    if (gamma.rank() != 1 || gamma.dim(0) != channels || beta.rank() != 1 || beta.dim(0) != channels)
        throw DimensionError("instance_norm: affine parameters must have " + std::to_string(channels) + " entries");
    if (eps < 0) throw ArgumentError("instance_norm: eps must be >= 0");

    const auto in = input.data();
    std::vector<Real> out(in.size());
    std::vector<Real> xhat(in.size());
    std::vector<Real> inv_std(static_cast<size_t>(batch * channels));
    for (int64_t b = 0; b < batch; ++b) {
        for (int64_t c = 0; c < channels; ++c) {
            const int64_t off = (b * channels + c) * plane;
            double s = 0;
            for (int64_t i = 0; i < plane; ++i) s += in[off + i];
            const double m = s / static_cast<double>(plane);
            double v = 0;
            for (int64_t i = 0; i < plane; ++i) {
                const double d = in[off + i] - m;
                v += d * d;
            }
            v /= static_cast<double>(plane);
            // Zero variance with eps == 0 collapses the channel to beta.
            const double denom = v + static_cast<double>(eps);
            const double is = denom > 0 ? 1.0 / std::sqrt(denom) : 0.0;
            inv_std[b * channels + c] = static_cast<Real>(is);
            for (int64_t i = 0; i < plane; ++i) {
                const Real xh = static_cast<Real>((in[off + i] - m) * is);
                xhat[off + i] = xh;
                out[off + i] = gamma[c] * xh + beta[c];
            }
        }
    }
    return make_result(
        "instance_norm", input.shape(), std::move(out), {input, gamma, beta},
        [input, gamma, beta, batch, channels, plane, xhat = std::move(xhat),
         inv_std = std::move(inv_std)](const TensorImpl& o) {
            const auto& dy = o.grad;
            for (int64_t b = 0; b < batch; ++b) {
                for (int64_t c = 0; c < channels; ++c) {
                    const int64_t off = (b * channels + c) * plane;
                    double sum_dy = 0, sum_dy_xhat = 0;
                    for (int64_t i = 0; i < plane; ++i) {
                        sum_dy += dy[off + i];
                        sum_dy_xhat += static_cast<double>(dy[off + i]) * xhat[off + i];
                    }
                    if (gamma.requires_grad()) grad_buffer(gamma)[c] += static_cast<Real>(sum_dy_xhat);
                    if (beta.requires_grad()) grad_buffer(beta)[c] += static_cast<Real>(sum_dy);
                    if (input.requires_grad()) {
                        auto& gx = grad_buffer(input);
                        const double g = gamma[c];
                        const double n = static_cast<double>(plane);
                        const double k = g * inv_std[b * channels + c] / n;
                        for (int64_t i = 0; i < plane; ++i)
                            gx[off + i] += static_cast<Real>(
                                k * (n * dy[off + i] - sum_dy - xhat[off + i] * sum_dy_xhat));
                    }
                }
            }
        });
}

// ---------------------------------------------------------------------------
// Pointwise

Tensor leaky_relu(const Tensor& input, Real slope)
{
    return unary("leaky_relu", input, [slope](Real x, Real& y, Real& d) {
        y = x >= 0 ? x : slope * x;
        d = x >= 0 ? Real(1) : slope;
    });
}

Tensor relu(const Tensor& input)
{
    return unary("relu", input, [](Real x, Real& y, Real& d) {
        y = x > 0 ? x : Real(0);
        d = x > 0 ? Real(1) : Real(0);
    });
}

Tensor sigmoid(const Tensor& input)
{
    return unary("sigmoid", input, [](Real x, Real& y, Real& d) {
        const Real e = std::exp(-std::abs(x));
        y = x >= 0 ? Real(1) / (Real(1) + e) : e / (Real(1) + e);
        d = y * (Real(1) - y);
    });
}

Tensor tanh(const Tensor& input)
{
    return unary("tanh", input, [](Real x, Real& y, Real& d) {
        y = std::tanh(x);
        d = Real(1) - y * y;
    });
}

Tensor log(const Tensor& a)
{
    return unary("log", a, [](Real x, Real& y, Real& d) {
        const bool clamped = x <= kLogFloor;  // NaN passes through
        y = std::log(clamped ? kLogFloor : x);
        d = clamped ? Real(0) : Real(1) / x;
    });
}

Tensor neg(const Tensor& a) { return affine(a, Real(-1), Real(0)); }

Tensor affine(const Tensor& a, Real scale, Real shift)
{
    return unary("affine", a, [scale, shift](Real x, Real& y, Real& d) {
        y = scale * x + shift;
        d = scale;
    });
}

Tensor add(const Tensor& a, const Tensor& b) { return binary("add", BinaryKind::add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary("sub", BinaryKind::sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary("mul", BinaryKind::mul, a, b); }

// ---------------------------------------------------------------------------
// Channel plumbing

Tensor concat_channels(const Tensor& a, const Tensor& b)
{
    require_rank4(a, "concat_channels");
    require_rank4(b, "concat_channels");
    if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3))
        throw DimensionError("concat_channels: mismatched shapes " + shape_to_string(a.shape()) + " and " +
                             shape_to_string(b.shape()));
    const int64_t batch = a.dim(0), ca = a.dim(1), cb = b.dim(1), plane = a.dim(2) * a.dim(3);
    std::vector<Real> out(static_cast<size_t>(batch * (ca + cb) * plane));
    const auto ad = a.data();
    const auto bd = b.data();
    for (int64_t n = 0; n < batch; ++n) {
        std::copy_n(ad.begin() + n * ca * plane, ca * plane, out.begin() + n * (ca + cb) * plane);
        std::copy_n(bd.begin() + n * cb * plane, cb * plane, out.begin() + (n * (ca + cb) + ca) * plane);
    }
    return make_result("concat_channels", {batch, ca + cb, a.dim(2), a.dim(3)}, std::move(out), {a, b},
                       [a, b, batch, ca, cb, plane](const TensorImpl& o) {
                           for (int64_t n = 0; n < batch; ++n) {
                               const Real* src = o.grad.data() + n * (ca + cb) * plane;
                               if (a.requires_grad()) {
                                   Real* dst = grad_buffer(a).data() + n * ca * plane;
                                   for (int64_t i = 0; i < ca * plane; ++i) dst[i] += src[i];
                               }
                               if (b.requires_grad()) {
                                   Real* dst = grad_buffer(b).data() + n * cb * plane;
                                   for (int64_t i = 0; i < cb * plane; ++i) dst[i] += src[ca * plane + i];
                               }
                           }
                       });
}

Tensor slice_channels(const Tensor& input, int64_t start, int64_t count)
{
    require_rank4(input, "slice_channels");
    const int64_t batch = input.dim(0), channels = input.dim(1), plane = input.dim(2) * input.dim(3);
    if (start < 0 || count < 1 || start + count > channels)
        throw DimensionError("slice_channels: range [" + std::to_string(start) + ", " + std::to_string(start + count) +
                             ") outside " + std::to_string(channels) + " channels");
    std::vector<Real> out(static_cast<size_t>(batch * count * plane));
    const auto in = input.data();
    for (int64_t n = 0; n < batch; ++n)
        std::copy_n(in.begin() + (n * channels + start) * plane, count * plane, out.begin() + n * count * plane);
    return make_result("slice_channels", {batch, count, input.dim(2), input.dim(3)}, std::move(out), {input},
                       [input, batch, channels, start, count, plane](const TensorImpl& o) {
                           if (!input.requires_grad()) return;
                           auto& g = grad_buffer(input);
                           for (int64_t n = 0; n < batch; ++n)
                               for (int64_t i = 0; i < count * plane; ++i)
                                   g[(n * channels + start) * plane + i] += o.grad[n * count * plane + i];
                       });
}

// ---------------------------------------------------------------------------
// Reductions. Accumulation runs in double so the scalar losses do not depend
// on summation order artifacts of 32-bit adds.

Tensor sum(const Tensor& a)
{
    double s = 0;
    for (Real v : a.data()) s += v;
    return make_result("sum", {1}, {static_cast<Real>(s)}, {a}, [a](const TensorImpl& o) {
        if (!a.requires_grad()) return;
        auto& g = grad_buffer(a);
        for (auto& v : g) v += o.grad[0];
    });
}

Tensor mean(const Tensor& a)
{
    double s = 0;
    for (Real v : a.data()) s += v;
    const double n = static_cast<double>(a.numel());
    return make_result("mean", {1}, {static_cast<Real>(s / n)}, {a}, [a, n](const TensorImpl& o) {
        if (!a.requires_grad()) return;
        auto& g = grad_buffer(a);
        const Real d = static_cast<Real>(o.grad[0] / n);
        for (auto& v : g) v += d;
    });
}

Tensor mean_per_sample(const Tensor& a)
{
    const int64_t batch = a.dim(0);
    const int64_t per = a.numel() / batch;
    std::vector<Real> out(static_cast<size_t>(batch));
    const auto d = a.data();
    for (int64_t b = 0; b < batch; ++b) {
        double s = 0;
        for (int64_t i = 0; i < per; ++i) s += d[b * per + i];
        out[b] = static_cast<Real>(s / static_cast<double>(per));
    }
    return make_result("mean_per_sample", {batch}, std::move(out), {a}, [a, batch, per](const TensorImpl& o) {
        if (!a.requires_grad()) return;
        auto& g = grad_buffer(a);
        for (int64_t b = 0; b < batch; ++b) {
            const Real v = static_cast<Real>(o.grad[b] / static_cast<double>(per));
            for (int64_t i = 0; i < per; ++i) g[b * per + i] += v;
        }
    });
}

Tensor l1_distance(const Tensor& a, const Tensor& b)
{
    if (a.shape() != b.shape())
        throw DimensionError("l1_distance: shapes " + shape_to_string(a.shape()) + " and " +
                             shape_to_string(b.shape()) + " differ");
    const auto ad = a.data();
    const auto bd = b.data();
    double s = 0;
    for (size_t i = 0; i < ad.size(); ++i) s += std::abs(static_cast<double>(ad[i]) - bd[i]);
    const double n = static_cast<double>(ad.size());
    return make_result("l1_distance", {1}, {static_cast<Real>(s / n)}, {a, b}, [a, b, n](const TensorImpl& o) {
        const auto ad = a.data();
        const auto bd = b.data();
        const Real scale = static_cast<Real>(o.grad[0] / n);
        auto sign = [](Real d) { return d > 0 ? Real(1) : d < 0 ? Real(-1) : Real(0); };
        if (a.requires_grad()) {
            auto& g = grad_buffer(a);
            for (size_t i = 0; i < g.size(); ++i) g[i] += scale * sign(ad[i] - bd[i]);
        }
        if (b.requires_grad()) {
            auto& g = grad_buffer(b);
            for (size_t i = 0; i < g.size(); ++i) g[i] -= scale * sign(ad[i] - bd[i]);
        }
    });
}

// ---------------------------------------------------------------------------

Tensor stack_batch(const std::vector<Tensor>& items)
{
    if (items.empty()) throw ArgumentError("stack_batch: no items");
    Shape item_shape(items.front().shape().begin() + 1, items.front().shape().end());
    int64_t batch = 0;
    std::vector<Real> out;
    for (const auto& t : items) {
        if (Shape(t.shape().begin() + 1, t.shape().end()) != item_shape)
            throw DimensionError("stack_batch: item shape " + shape_to_string(t.shape()) + " differs");
        batch += t.dim(0);
        out.insert(out.end(), t.data().begin(), t.data().end());
    }
    Shape shape{batch};
    shape.insert(shape.end(), item_shape.begin(), item_shape.end());
    return Tensor::from_data(shape, std::move(out));
}

Tensor batch_item(const Tensor& batch, int64_t index)
{
    if (index < 0 || index >= batch.dim(0)) throw ArgumentError("batch_item: index out of range");
    const int64_t per = batch.numel() / batch.dim(0);
    Shape shape = batch.shape();
    shape[0] = 1;
    std::vector<Real> out(batch.data().begin() + index * per, batch.data().begin() + (index + 1) * per);
    return Tensor::from_data(shape, std::move(out));
}

}  // namespace neglectnet
