#pragma once

#include <cstdint>
#include <functional>

#include "neglectnet/common.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

/// Number of worker threads used inside ops. Read once from the
/// NEGLECTNET_THREADS environment variable, capped at the hardware count.
int intra_op_threads();

/// Override for tests and bindings; 0 restores the environment default.
void set_intra_op_threads(int n);

/// Runs fn(begin, end) over a static partition of [0, n). Each index is owned
/// by exactly one chunk, so results do not depend on the thread count as long
/// as fn writes only to outputs it owns.
void parallel_for(int64_t n, int64_t min_chunk, const std::function<void(int64_t, int64_t)>& fn);

}  // namespace neglectnet
