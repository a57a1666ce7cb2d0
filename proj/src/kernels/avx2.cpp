// Compiled with -mavx2 (and without -mfma); only reached after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "jaqm/kernels/kernels.hpp"

namespace jaqm::kernels {

namespace {

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

void scale_by_sqrt(const double* normals, const double* lengths, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d len = _mm256_loadu_pd(lengths + i);
    const __m256d z = _mm256_loadu_pd(normals + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sqrt_pd(len), z));
  }
  for (; i < n; ++i) out[i] = std::sqrt(lengths[i]) * normals[i];
}

void interval_interpolant(const double* t, const double* w, std::size_t n, const IntervalCoefficients& c,
                          double* out) {
  const __m256d t0 = _mm256_set1_pd(c.t0);
  const __m256d w0 = _mm256_set1_pd(c.w0);
  const __m256d z0 = _mm256_set1_pd(c.z0);
  const __m256d a = _mm256_set1_pd(c.drift);
  const __m256d b = _mm256_set1_pd(c.diffusion);
  const __m256d k = _mm256_set1_pd(c.correction);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dt = _mm256_sub_pd(_mm256_loadu_pd(t + i), t0);
    const __m256d dw = _mm256_sub_pd(_mm256_loadu_pd(w + i), w0);
    __m256d z = _mm256_add_pd(z0, _mm256_mul_pd(a, dt));
    z = _mm256_add_pd(z, _mm256_mul_pd(b, dw));
    z = _mm256_add_pd(z, _mm256_mul_pd(k, _mm256_sub_pd(_mm256_mul_pd(dw, dw), dt)));
    _mm256_storeu_pd(out + i, z);
  }
  for (; i < n; ++i) {
    const double dt = t[i] - c.t0;
    const double dw = w[i] - c.w0;
    out[i] = ((c.z0 + c.drift * dt) + c.diffusion * dw) + c.correction * (dw * dw - dt);
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_max_pd(acc, abs_pd(d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double band_occupancy(const double* values, const double* weights, std::size_t n, double center, double radius) {
  const __m256d c = _mm256_set1_pd(center);
  const __m256d r = _mm256_set1_pd(radius);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dist = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(values + i), c));
    const __m256d inside = _mm256_cmp_pd(dist, r, _CMP_LE_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(inside, _mm256_loadu_pd(weights + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    if (std::abs(values[i] - center) <= radius) sum += weights[i];
  }
  return sum;
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable t{&scale_by_sqrt, &interval_interpolant, &max_abs_diff, &band_occupancy};
  return t;
}

}  // namespace jaqm::kernels
