#include <algorithm>
#include <cmath>

#include "jaqm/kernels/kernels.hpp"

namespace jaqm::kernels {

namespace {

void scale_by_sqrt(const double* normals, const double* lengths, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(lengths[i]) * normals[i];
}

void interval_interpolant(const double* t, const double* w, std::size_t n, const IntervalCoefficients& c,
                          double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = t[i] - c.t0;
    const double dw = w[i] - c.w0;
    out[i] = ((c.z0 + c.drift * dt) + c.diffusion * dw) + c.correction * (dw * dw - dt);
  }
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double band_occupancy(const double* values, const double* weights, std::size_t n, double center, double radius) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(values[i] - center) <= radius) sum += weights[i];
  }
  return sum;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable t{&scale_by_sqrt, &interval_interpolant, &max_abs_diff, &band_occupancy};
  return t;
}

}  // namespace jaqm::kernels
