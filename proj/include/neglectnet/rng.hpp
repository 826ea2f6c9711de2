#pragma once

#include <cstdint>
#include <random>

#include "neglectnet/common.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// splitmix64 finalizer; used to derive independent child streams.
constexpr uint64_t mix_seed(uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr uint64_t derive_seed(uint64_t seed, uint64_t index) noexcept
{
    return mix_seed(mix_seed(seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

/// Portable random stream. The standard distributions are implementation
/// defined, so the conversions from raw engine output are done here.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    uint64_t seed() const noexcept { return seed_; }

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n)
    {
        if (n <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    int uniform_int(int lo, int hi_inclusive)
    {
        return lo + static_cast<int>(uniform_int(static_cast<uint64_t>(hi_inclusive - lo + 1)));
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal();

    /// Independent stream keyed by (seed, index); does not consume state.
    Rng child(uint64_t index) const { return Rng(derive_seed(seed_, index)); }

private:
    std::mt19937_64 engine_;
    uint64_t seed_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace neglectnet
