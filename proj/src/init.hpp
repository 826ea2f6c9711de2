#pragma once

#include "neglectnet/rng.hpp"
#include "neglectnet/tensor.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION::init {

inline constexpr double kWeightStd = 0.02;

inline Tensor gaussian(const Shape& shape, Rng& rng, double stddev = kWeightStd)
{
    std::vector<Real> d(static_cast<size_t>(shape_numel(shape)));
    for (auto& v : d) v = static_cast<Real>(rng.normal() * stddev);
    return Tensor::from_data(shape, std::move(d), true);
}

inline Tensor ones(int64_t n) { return Tensor::full({n}, Real(1), true); }
inline Tensor zeros(int64_t n) { return Tensor::full({n}, Real(0), true); }

}  // namespace neglectnet::init
