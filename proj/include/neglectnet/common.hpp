#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Storage type of the numeric core. The 64-bit variant only exists for
// gradient-check diagnostics; it lives in its own inline namespace so both
// variants can be linked into one binary.
#ifdef NEGLECTNET_FLOAT64
#define NEGLECTNET_PRECISION f64
#else
#define NEGLECTNET_PRECISION f32
#endif

namespace neglectnet::inline NEGLECTNET_PRECISION {

#ifdef NEGLECTNET_FLOAT64
using Real = double;
#else
using Real = float;
#endif

using Shape = std::vector<int64_t>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

std::string shape_to_string(const Shape& shape);
int64_t shape_numel(const Shape& shape);

}  // namespace neglectnet
