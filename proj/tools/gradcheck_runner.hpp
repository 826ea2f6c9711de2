#pragma once

#include <cstdint>
#include <ostream>

// Runs the op and network gradient checks with the core of one precision and
// prints one line per case. Returns true iff every case passed.
namespace neglectnet::cli {

bool run_gradcheck_f32(uint64_t seed, bool inject_fault, std::ostream& out);
bool run_gradcheck_f64(uint64_t seed, bool inject_fault, std::ostream& out);

}  // namespace neglectnet::cli
