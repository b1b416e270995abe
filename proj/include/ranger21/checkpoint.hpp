#pragma once

#include <filesystem>
#include <iosfwd>

#include "ranger21/engine.hpp"

namespace ranger21 {

// Binary checkpoint of an Optimizer: preset, full configuration, step count,
// and every named buffer (parameters, moments, slow weights). All integers
// and doubles are stored as little-endian 64-bit words, so a restored
// optimizer continues bit-identically to an uninterrupted one.
//
//   magic "R21CKPT\0" | u64 version | u64 preset | config words
//   | i64 steps | u64 tensor count | per tensor: name, shape, values,
//     m_prev, m_prev2, v, v_max, slow weights

inline constexpr std::uint64_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Optimizer& opt);
Optimizer read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Optimizer& opt);
Optimizer load_checkpoint(const std::filesystem::path& path);

}  // namespace ranger21
