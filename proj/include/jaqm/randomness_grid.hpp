#pragma once

// Poisson jump times, jump-adapted time grids, and Brownian paths coupled
// across resolutions.
//
// One sample path owns a master grid {m T / M_ref} U {jump times <= T} with the
// Brownian motion stored at every master point. A coarser grid at resolution
// M | M_ref is a subset of the master grid, and its increments are differences
// of the stored Brownian values, so all resolutions see the same (W, N).

#include <cstdint>
#include <span>
#include <vector>

#include "jaqm/errors.hpp"
#include "jaqm/rng.hpp"

namespace jaqm {

struct JumpTimes {
  std::vector<double> times;  // strictly increasing, in (0, T]
  std::size_t count() const noexcept { return times.size(); }
};

/// Cumulative sums of Exponential(lambda) draws, truncated at T.
JumpTimes draw_jump_times(double lambda, double T, CounterStream& stream);

/// Deterministic grid point m T / M. Nested resolutions produce bit-identical times.
inline double deterministic_time(std::int64_t m, std::int64_t M, double T) noexcept {
  return static_cast<double>(m) / static_cast<double>(M) * T;
}

/// Largest m T / M not exceeding t. Throws DomainError for t outside [0, T].
double underline_t(double t, std::int64_t M, double T);

enum PointFlag : std::uint8_t {
  kDeterministic = 1,
  kJump = 2,
  kTerminal = 4,
};

class AdaptedGrid {
 public:
  /// Sorted union of {m T / M : m = 0..M} and the jump times. A jump landing
  /// exactly on a deterministic point yields one point tagged as a jump.
  static AdaptedGrid build(std::int64_t M, double T, const JumpTimes& jumps);

  /// Same grid as build(M, T, jumps), selected from this one. Requires M | resolution().
  AdaptedGrid coarsen(std::int64_t M) const;

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t intervals() const noexcept { return times_.size() - 1; }
  std::span<const double> times() const noexcept { return times_; }
  std::span<const std::uint8_t> flags() const noexcept { return flags_; }
  /// m for points at m T / M, -1 for jump points off the deterministic lattice.
  std::span<const std::int64_t> lattice_index() const noexcept { return lattice_; }
  /// Index of each point in the grid this one was coarsened from (identity for build()).
  std::span<const std::size_t> source_index() const noexcept { return source_; }

  bool is_jump(std::size_t n) const noexcept { return (flags_[n] & kJump) != 0; }
  bool is_deterministic(std::size_t n) const noexcept { return (flags_[n] & kDeterministic) != 0; }
  bool is_terminal(std::size_t n) const noexcept { return (flags_[n] & kTerminal) != 0; }

  std::int64_t resolution() const noexcept { return M_; }
  double horizon() const noexcept { return T_; }
  double delta() const noexcept { return T_ / static_cast<double>(M_); }

 private:
  std::vector<double> times_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::int64_t> lattice_;
  std::vector<std::size_t> source_;
  std::int64_t M_ = 0;
  double T_ = 0.0;
};

/// Independent N(0, t_{i+1} - t_i) increments over consecutive times.
std::vector<double> draw_brownian(std::span<const double> times, CounterStream& stream);

/// All randomness of one sample path at the master resolution.
struct PathRandomness {
  double T = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  JumpTimes jumps;
  AdaptedGrid master;
  std::vector<double> w;   // W at master points, w[0] = 0
  std::vector<double> dw;  // dw[i] = w[i + 1] - w[i]
};

/// Jump times from substream `jumps`, Brownian increments from substream `brownian`
/// of the counter-based stream (seed, path).
PathRandomness draw_path_randomness(double T, double lambda, std::int64_t master_resolution, std::uint64_t seed,
                                    std::uint64_t path);

/// Rebuilds a PathRandomness from stored jump times and Brownian values.
PathRandomness assemble_path_randomness(double T, double lambda, std::int64_t master_resolution, std::uint64_t seed,
                                        std::uint64_t path, JumpTimes jumps, std::vector<double> w);

/// Randomness seen by a scheme on one grid.
struct DrivingPath {
  AdaptedGrid grid;
  std::vector<double> w;                  // W at grid points
  std::vector<double> dw;                 // w[n + 1] - w[n]
  std::vector<std::uint8_t> jump_count;   // N increment over (tau_n, tau_{n+1}], 0 or 1
  std::vector<std::size_t> master_index;  // grid point -> master point
};

/// Restricts the master randomness to `grid`, whose points must all be master points.
/// Throws CouplingError otherwise.
DrivingPath restrict_to(const PathRandomness& pr, const AdaptedGrid& grid);
/// Restriction to the jump-adapted grid at resolution M (M must divide the master resolution).
DrivingPath restrict_to(const PathRandomness& pr, std::int64_t M);

}  // namespace jaqm
