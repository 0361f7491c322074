#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chase/core/tensor.hpp"

namespace chase::train {

// .chck layout (little-endian):
//   "CHCK", u16 version (1), u16 reserved,
//   u64 epoch, u64 step, u64 seed,
//   u32 tensor count, then per tensor: u16 name length, name bytes,
//     u32 rank, u64 extents[rank], f64 values (row-major),
//   u32 config length, config JSON text.
// Every random stream of the trainer is keyed by (seed, epoch, step), so
// these three integers are the complete RNG state.
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct Checkpoint {
  std::vector<std::pair<std::string, TensorXd>> tensors;
  std::uint64_t epoch = 0;
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();

  /// Throws FormatError if absent.
  const TensorXd& tensor(const std::string& name) const;
  bool has(const std::string& name) const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace chase::train
