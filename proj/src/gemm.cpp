#include "gemm.hpp"

#include <algorithm>
#include <vector>

#include "neglectnet/parallel.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION::kernels {
namespace {

constexpr int64_t kBlockK = 128;

// Each worker owns a band of output rows, so the summation order per element
// is fixed regardless of the thread count.
void gemm_rows(int64_t m, int64_t n, int64_t k, const Real* a, int64_t a_row, int64_t a_col, const Real* b, Real* c)
{
    const int64_t min_rows = std::max<int64_t>(1, 32768 / std::max<int64_t>(1, n * k));
    parallel_for(m, min_rows, [&](int64_t r0, int64_t r1) {
        for (int64_t kb = 0; kb < k; kb += kBlockK) {
            const int64_t ke = std::min(k, kb + kBlockK);
            for (int64_t i = r0; i < r1; ++i) {
                Real* __restrict crow = c + i * n;
                for (int64_t p = kb; p < ke; ++p) {
                    const Real av = a[i * a_row + p * a_col];
                    const Real* __restrict brow = b + p * n;
                    for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
                }
            }
        }
    });
}

}  // namespace

void gemm_nn(int64_t m, int64_t n, int64_t k, const Real* a, const Real* b, Real* c)
{
    gemm_rows(m, n, k, a, k, 1, b, c);
}

void gemm_tn(int64_t m, int64_t n, int64_t k, const Real* a, const Real* b, Real* c)
{
    gemm_rows(m, n, k, a, 1, m, b, c);
}

void gemm_nt(int64_t m, int64_t n, int64_t k, const Real* a, const Real* b, Real* c)
{
    std::vector<Real> bt(static_cast<size_t>(k * n));
    for (int64_t j = 0; j < n; ++j)
        for (int64_t p = 0; p < k; ++p) bt[static_cast<size_t>(p * n + j)] = b[j * k + p];
    gemm_rows(m, n, k, a, k, 1, bt.data(), c);
}

void im2col(const ConvGeometry& g, const Real* image, Real* col)
{
    const int64_t cols = g.col_cols();
    for (int64_t c = 0; c < g.channels; ++c) {
        const Real* plane = image + c * g.height * g.width;
        for (int64_t ki = 0; ki < g.kernel; ++ki) {
            for (int64_t kj = 0; kj < g.kernel; ++kj) {
                Real* dst = col + ((c * g.kernel + ki) * g.kernel + kj) * cols;
                for (int64_t oh = 0; oh < g.out_h; ++oh) {
                    const int64_t ih = oh * g.stride - g.padding + ki;
                    Real* drow = dst + oh * g.out_w;
                    if (ih < 0 || ih >= g.height) {
                        std::fill(drow, drow + g.out_w, Real(0));
                        continue;
                    }
                    const Real* srow = plane + ih * g.width;
                    for (int64_t ow = 0; ow < g.out_w; ++ow) {
                        const int64_t iw = ow * g.stride - g.padding + kj;
                        drow[ow] = (iw >= 0 && iw < g.width) ? srow[iw] : Real(0);
                    }
                }
            }
        }
    }
}

void col2im(const ConvGeometry& g, const Real* col, Real* image)
{
    const int64_t cols = g.col_cols();
    for (int64_t c = 0; c < g.channels; ++c) {
        Real* plane = image + c * g.height * g.width;
        for (int64_t ki = 0; ki < g.kernel; ++ki) {
            for (int64_t kj = 0; kj < g.kernel; ++kj) {
                const Real* src = col + ((c * g.kernel + ki) * g.kernel + kj) * cols;
                for (int64_t oh = 0; oh < g.out_h; ++oh) {
                    const int64_t ih = oh * g.stride - g.padding + ki;
                    if (ih < 0 || ih >= g.height) continue;
                    Real* drow = plane + ih * g.width;
                    const Real* srow = src + oh * g.out_w;
                    for (int64_t ow = 0; ow < g.out_w; ++ow) {
                        const int64_t iw = ow * g.stride - g.padding + kj;
                        if (iw >= 0 && iw < g.width) drow[iw] += srow[ow];
                    }
                }
            }
        }
    }
}

}  // namespace neglectnet::kernels
