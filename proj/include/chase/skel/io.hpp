#pragma once

#include <string>

#include "chase/skel/sequence.hpp"

namespace chase::skel {

// .chsk layout (little-endian):
//   0  "CHSK"
//   4  u16 format version (1)
//   6  u16 flags (bit 0: per-sample valid_frames array present)
//   8  u32 C, T, J, E, N
//  28  u32 reserved (0)
//  32  f32 coordinates, N samples of (C, T, J, E) row-major
//      u32 labels[N]
//      u32 valid_frames[N]   (only when flag bit 0 is set)
// A sidecar "<path>.json" manifest holds {"version", "classes", "generator", "seed"}.

inline constexpr std::uint16_t kDatasetVersion = 1;

/// Writes the binary file and its sidecar manifest. Coordinates are stored as
/// 32-bit floats, so the round trip is exact only for float-representable data.
void save_dataset(const std::string& path, const Dataset& data);

/// Throws FormatError (with byte offset) on bad magic, version, truncation or
/// trailing bytes. A missing sidecar leaves the metadata empty.
Dataset load_dataset(const std::string& path);

std::string manifest_path(const std::string& dataset_path);

}  // namespace chase::skel
