#pragma once

#include <cstdint>

#include "neglectnet/common.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION::kernels {

// Row-major accumulating products: C (m x n) += op(A) * op(B).
void gemm_nn(int64_t m, int64_t n, int64_t k, const Real* a, const Real* b, Real* c);  // A m x k, B k x n
void gemm_tn(int64_t m, int64_t n, int64_t k, const Real* a, const Real* b, Real* c);  // A k x m, B k x n
void gemm_nt(int64_t m, int64_t n, int64_t k, const Real* a, const Real* b, Real* c);  // A m x k, B n x k

struct ConvGeometry {
    int64_t channels, height, width;  // image side
    int64_t out_h, out_w;             // sliding-window grid
    int64_t kernel, stride, padding;

    int64_t col_rows() const { return channels * kernel * kernel; }
    int64_t col_cols() const { return out_h * out_w; }
};

void im2col(const ConvGeometry& g, const Real* image, Real* col);
/// Scatter-adds columns back into the image buffer.
void col2im(const ConvGeometry& g, const Real* col, Real* image);

}  // namespace neglectnet::kernels
