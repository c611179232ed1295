#pragma once

#include <filesystem>

#include "orient/volume.hpp"

namespace orient {

/// OBV1 volume file: 16-byte header ("OBV1", u32 n, u32 reserved = 0,
/// u32 payload byte length = 4 n^3, all little-endian) followed by n^3
/// float32 little-endian values in x-fastest order.
void write_obv(const VolumeGrid& v, const std::filesystem::path& path);

/// Throws FileError on a missing file, bad magic, nonzero reserved field,
/// length mismatch or non-finite payload.
VolumeGrid read_obv(const std::filesystem::path& path);

}  // namespace orient
