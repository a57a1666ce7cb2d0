#include "jaqm/path_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace jaqm {

namespace {

template <class U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("path file truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double x) { put_le(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_path_randomness(std::ostream& out, const PathRandomness& pr) {
  out.write(kPathMagic, sizeof(kPathMagic));
  put_le<std::uint32_t>(out, kPathFormatVersion);
  put_le<std::uint32_t>(out, 0);
  put_f64(out, pr.T);
  put_f64(out, pr.lambda);
  put_le<std::uint64_t>(out, pr.seed);
  put_le<std::uint64_t>(out, pr.path);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(pr.master.resolution()));
  put_le<std::uint64_t>(out, pr.jumps.count());
  put_le<std::uint64_t>(out, pr.w.size());
  for (double t : pr.jumps.times) put_f64(out, t);
  for (double w : pr.w) put_f64(out, w);
  if (!out) throw ConfigError("failed to write path randomness");
}

PathRandomness read_path_randomness(std::istream& in) {
  char magic[sizeof(kPathMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kPathMagic, sizeof(magic)) != 0) throw ConfigError("not a path randomness file");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kPathFormatVersion) throw ConfigError("unsupported path file version " + std::to_string(version));
  (void)get_le<std::uint32_t>(in);
  const double T = get_f64(in);
  const double lambda = get_f64(in);
  const auto seed = get_le<std::uint64_t>(in);
  const auto path = get_le<std::uint64_t>(in);
  const auto m_ref = static_cast<std::int64_t>(get_le<std::uint64_t>(in));
  const auto n_jumps = get_le<std::uint64_t>(in);
  const auto n_points = get_le<std::uint64_t>(in);
  // P < M_ref + 1 + J when a jump lands on a lattice point; the grid rebuild checks P exactly.
  if (m_ref < 1 || n_points > static_cast<std::uint64_t>(m_ref) + 1 + n_jumps) {
    throw ConfigError("path file header is inconsistent");
  }
  JumpTimes jumps;
  jumps.times.resize(n_jumps);
  for (auto& t : jumps.times) t = get_f64(in);
  std::vector<double> w(n_points);
  for (auto& x : w) x = get_f64(in);
  try {
    return assemble_path_randomness(T, lambda, m_ref, seed, path, std::move(jumps), std::move(w));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("path file is inconsistent: ") + e.what());
  }
}

void save_path_randomness(const std::string& file, const PathRandomness& pr) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + file + " for writing");
  write_path_randomness(out, pr);
}

PathRandomness load_path_randomness(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file);
  return read_path_randomness(in);
}

}  // namespace jaqm
