#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "jaqm/kernels/kernels.hpp"

namespace jaqm::kernels {

namespace {

bool detect_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool cpu_has_avx2() noexcept {
  static const bool has = detect_avx2();
  return has;
}

Isa initial_isa() {
  const Isa best = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  const char* env = std::getenv("JAQM_SIMD");
  if (env == nullptr) return best;
  const std::string v(env);
  if (v == "scalar") return Isa::scalar;
  if (v == "avx2" && cpu_has_avx2()) return Isa::avx2;
  return best;
}

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw std::invalid_argument("kernel ISA not supported on this CPU: " + std::string(isa_name(isa)));
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::avx2) return avx2_table();
#endif
  return scalar_table();
}

Isa active_isa() noexcept { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!supported(isa)) throw std::invalid_argument("kernel ISA not supported on this CPU: " + std::string(isa_name(isa)));
  active_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return table(active_isa()); }

}  // namespace jaqm::kernels
