#include "jaqm/randomness_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jaqm/kernels/kernels.hpp"

namespace jaqm {

JumpTimes draw_jump_times(double lambda, double T, CounterStream& stream) {
  if (!(lambda > 0.0) || !(T > 0.0)) throw DomainError("jump times need positive intensity and horizon");
  JumpTimes jumps;
  double t = stream.exponential(lambda);
  while (t <= T) {
    jumps.times.push_back(t);
    t += stream.exponential(lambda);
  }
  return jumps;
}

double underline_t(double t, std::int64_t M, double T) {
  if (!(t >= 0.0 && t <= T)) throw DomainError("underline_t: t outside [0, T]");
  if (M < 1) throw DomainError("underline_t: resolution must be positive");
  auto m = static_cast<std::int64_t>(std::floor(t * static_cast<double>(M) / T));
  m = std::clamp<std::int64_t>(m, 0, M);
  while (m > 0 && deterministic_time(m, M, T) > t) --m;
  while (m < M && deterministic_time(m + 1, M, T) <= t) ++m;
  return deterministic_time(m, M, T);
}

AdaptedGrid AdaptedGrid::build(std::int64_t M, double T, const JumpTimes& jumps) {
  if (M < 1) throw DomainError("grid resolution must be at least 1");
  if (!(T > 0.0)) throw DomainError("grid horizon must be positive");
  AdaptedGrid g;
  g.M_ = M;
  g.T_ = T;
  const std::size_t reserve = static_cast<std::size_t>(M) + 1 + jumps.count();
  g.times_.reserve(reserve);
  g.flags_.reserve(reserve);
  g.lattice_.reserve(reserve);

  g.times_.push_back(0.0);
  g.flags_.push_back(kDeterministic);
  g.lattice_.push_back(0);

  std::size_t j = 0;
  std::int64_t m = 1;
  const auto& jt = jumps.times;
  while (m <= M) {
    const double td = deterministic_time(m, M, T);
    if (j < jt.size() && jt[j] <= T && jt[j] < td) {
      if (!(jt[j] > g.times_.back())) throw DomainError("jump times must be strictly increasing and positive");
      g.times_.push_back(jt[j]);
      g.flags_.push_back(kJump);
      g.lattice_.push_back(-1);
      ++j;
      continue;
    }
    const std::uint8_t terminal = m == M ? kTerminal : 0;
    if (j < jt.size() && jt[j] == td) {
      g.times_.push_back(td);
      g.flags_.push_back(kJump | terminal);
      ++j;
    } else {
      g.times_.push_back(td);
      g.flags_.push_back(kDeterministic | terminal);
    }
    g.lattice_.push_back(m);
    ++m;
  }
  g.source_.resize(g.times_.size());
  for (std::size_t i = 0; i < g.source_.size(); ++i) g.source_[i] = i;
  return g;
}

AdaptedGrid AdaptedGrid::coarsen(std::int64_t M) const {
  if (M < 1 || M_ % M != 0) throw CouplingError("coarse resolution must divide the master resolution");
  const std::int64_t stride = M_ / M;
  AdaptedGrid g;
  g.M_ = M;
  g.T_ = T_;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const bool on_lattice = lattice_[i] >= 0 && lattice_[i] % stride == 0;
    if (!on_lattice && !is_jump(i)) continue;
    std::uint8_t f = flags_[i] & (kJump | kTerminal);
    if (on_lattice && !is_jump(i)) f |= kDeterministic;
    g.times_.push_back(times_[i]);
    g.flags_.push_back(f);
    g.lattice_.push_back(on_lattice ? lattice_[i] / stride : -1);
    g.source_.push_back(i);
  }
  return g;
}

std::vector<double> draw_brownian(std::span<const double> times, CounterStream& stream) {
  if (times.size() < 2) return {};
  const std::size_t n = times.size() - 1;
  std::vector<double> normals(n);
  std::vector<double> lengths(n);
  for (std::size_t i = 0; i < n; ++i) {
    normals[i] = stream.normal();
    lengths[i] = times[i + 1] - times[i];
    if (lengths[i] < 0.0) throw DomainError("draw_brownian: times must be non-decreasing");
  }
  std::vector<double> dw(n);
  kernels::scale_by_sqrt(normals, lengths, dw);
  return dw;
}

PathRandomness assemble_path_randomness(double T, double lambda, std::int64_t master_resolution, std::uint64_t seed,
                                        std::uint64_t path, JumpTimes jumps, std::vector<double> w) {
  PathRandomness pr;
  pr.T = T;
  pr.lambda = lambda;
  pr.seed = seed;
  pr.path = path;
  pr.master = AdaptedGrid::build(master_resolution, T, jumps);
  pr.jumps = std::move(jumps);
  if (w.size() != pr.master.size()) throw CouplingError("Brownian values do not match the master grid");
  pr.w = std::move(w);
  pr.dw.resize(pr.w.size() - 1);
  for (std::size_t i = 0; i + 1 < pr.w.size(); ++i) pr.dw[i] = pr.w[i + 1] - pr.w[i];
  return pr;
}

PathRandomness draw_path_randomness(double T, double lambda, std::int64_t master_resolution, std::uint64_t seed,
                                    std::uint64_t path) {
  CounterStream jump_stream(seed, path, Substream::jumps);
  JumpTimes jumps = draw_jump_times(lambda, T, jump_stream);
  const AdaptedGrid master = AdaptedGrid::build(master_resolution, T, jumps);

  CounterStream brownian_stream(seed, path, Substream::brownian);
  const std::vector<double> increments = draw_brownian(master.times(), brownian_stream);
  std::vector<double> w(master.size());
  w[0] = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) w[i + 1] = w[i] + increments[i];
  return assemble_path_randomness(T, lambda, master_resolution, seed, path, std::move(jumps), std::move(w));
}

DrivingPath restrict_to(const PathRandomness& pr, const AdaptedGrid& grid) {
  const auto master_t = pr.master.times();
  const auto coarse_t = grid.times();
  DrivingPath d;
  d.master_index.resize(coarse_t.size());
  std::size_t j = 0;
  for (std::size_t n = 0; n < coarse_t.size(); ++n) {
    while (j < master_t.size() && master_t[j] < coarse_t[n]) ++j;
    if (j == master_t.size() || master_t[j] != coarse_t[n]) {
      throw CouplingError("grid point " + std::to_string(coarse_t[n]) + " is not on the master grid");
    }
    d.master_index[n] = j;
  }
  d.w.resize(coarse_t.size());
  for (std::size_t n = 0; n < coarse_t.size(); ++n) d.w[n] = pr.w[d.master_index[n]];
  d.dw.resize(coarse_t.size() - 1);
  d.jump_count.resize(coarse_t.size() - 1);
  for (std::size_t n = 0; n + 1 < coarse_t.size(); ++n) {
    d.dw[n] = d.w[n + 1] - d.w[n];
    std::uint8_t count = 0;
    for (std::size_t k = d.master_index[n] + 1; k <= d.master_index[n + 1]; ++k) {
      if (pr.master.is_jump(k)) ++count;
    }
    if (count > 1 || (count == 1 && !pr.master.is_jump(d.master_index[n + 1]))) {
      throw CouplingError("jump time inside a grid interval: the grid is not jump-adapted");
    }
    d.jump_count[n] = count;
  }
  d.grid = grid;
  return d;
}

DrivingPath restrict_to(const PathRandomness& pr, std::int64_t M) { return restrict_to(pr, pr.master.coarsen(M)); }

}  // namespace jaqm
