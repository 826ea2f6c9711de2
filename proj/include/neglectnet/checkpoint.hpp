#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neglectnet/training.hpp"

namespace neglectnet::inline NEGLECTNET_PRECISION {

inline constexpr char kCheckpointMagic[4] = {'N', 'G', 'N', 'T'};
inline constexpr uint32_t kCheckpointVersion = 1;

struct NamedTensor {
    std::string name;
    Shape shape;
    std::vector<float> data;
};

// Archive layout, little-endian: magic "NGNT", u32 version, u32 tensor count,
// then per tensor u32 name length, UTF-8 name, u32 rank, u32 extents and the
// float32 payload.
std::vector<uint8_t> encode_checkpoint(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> decode_checkpoint(const std::vector<uint8_t>& bytes);

/// Writes through a temporary file and a rename, so an interrupted save
/// leaves any previous checkpoint intact.
void write_checkpoint_file(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint_file(const std::string& path);

/// Generator and discriminator parameters (g/, d/) plus both Adam states
/// (adam_g/, adam_d/) and the completed step count.
std::vector<NamedTensor> checkpoint_tensors(const TrainState& state);

/// Overwrites `state`, which must have been built from the same
/// configuration; any missing, extra or reshaped tensor is a ConfigError.
void restore_checkpoint(TrainState& state, const std::vector<NamedTensor>& tensors);

void save_checkpoint(const std::string& path, const TrainState& state);
void load_checkpoint(const std::string& path, TrainState& state);

/// Loads only the generator parameters (for eval and infer).
GeneratorParams load_generator(const std::string& path, const NetConfig& config);

}  // namespace neglectnet
