#pragma once

// Binary dump/replay of one path's randomness, for regression fixtures.
//
// Layout (all fields little-endian):
//   offset  size  field
//        0     8  magic "JAQMPATH"
//        8     4  u32 format version (1)
//       12     4  u32 reserved (0)
//       16     8  f64 horizon T
//       24     8  f64 jump intensity lambda
//       32     8  u64 master seed
//       40     8  u64 path index
//       48     8  i64 master resolution M_ref
//       56     8  u64 number of jump times J
//       64     8  u64 number of master grid points P
//       72   8*J  f64 jump times
//        .   8*P  f64 Brownian values at the master grid points

#include <iosfwd>
#include <string>

#include "jaqm/randomness_grid.hpp"

namespace jaqm {

inline constexpr char kPathMagic[8] = {'J', 'A', 'Q', 'M', 'P', 'A', 'T', 'H'};
inline constexpr std::uint32_t kPathFormatVersion = 1;

void write_path_randomness(std::ostream& out, const PathRandomness& pr);
/// Throws ConfigError on a malformed or truncated stream.
PathRandomness read_path_randomness(std::istream& in);

void save_path_randomness(const std::string& file, const PathRandomness& pr);
PathRandomness load_path_randomness(const std::string& file);

}  // namespace jaqm
