#pragma once

// Data-parallel inner loops of the Monte Carlo harness.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. The element-wise kernels round exactly like the
// scalar reference (no FMA, same operation order), so switching ISA never
// changes a simulated path. Only `band_occupancy` reassociates its sum.
//
// The initial selection is the best supported ISA, overridable with the
// environment variable JAQM_SIMD=scalar|avx2|auto.

#include <cstddef>
#include <span>
#include <string_view>

namespace jaqm::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Frozen coefficients of one scheme interval starting at (t0, w0) in state z0.
/// Interpolant: ((z0 + drift*dt) + diffusion*dw) + correction*(dw*dw - dt).
struct IntervalCoefficients {
  double t0;
  double w0;
  double z0;
  double drift;
  double diffusion;
  double correction;
};

struct KernelTable {
  /// out[i] = sqrt(lengths[i]) * normals[i]
  void (*scale_by_sqrt)(const double* normals, const double* lengths, double* out, std::size_t n);
  /// out[i] = interpolant at (t[i], w[i])
  void (*interval_interpolant)(const double* t, const double* w, std::size_t n, const IntervalCoefficients& c,
                               double* out);
  /// max_i |a[i] - b[i]|, 0 for n = 0. Inputs must be finite.
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  /// sum of weights[i] over |values[i] - center| <= radius
  double (*band_occupancy)(const double* values, const double* weights, std::size_t n, double center,
                           double radius);
};

bool supported(Isa isa) noexcept;
const KernelTable& table(Isa isa);

Isa active_isa() noexcept;
/// Throws std::invalid_argument if the CPU lacks `isa`.
void set_active_isa(Isa isa);
const KernelTable& active();

const KernelTable& scalar_table() noexcept;
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table() noexcept;
#endif

inline void scale_by_sqrt(std::span<const double> normals, std::span<const double> lengths, std::span<double> out) {
  active().scale_by_sqrt(normals.data(), lengths.data(), out.data(), out.size());
}

inline void interval_interpolant(std::span<const double> t, std::span<const double> w, const IntervalCoefficients& c,
                                 std::span<double> out) {
  active().interval_interpolant(t.data(), w.data(), out.size(), c, out.data());
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

inline double band_occupancy(std::span<const double> values, std::span<const double> weights, double center,
                             double radius) {
  return active().band_occupancy(values.data(), weights.data(), values.size(), center, radius);
}

}  // namespace jaqm::kernels
