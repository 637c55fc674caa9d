#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "odpd/kernels.hpp"

namespace odpd::kernels {
namespace {

bool cpu_has_avx2() {
#if ODPD_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("ODPD_SIMD")) {
    const std::string value(env);
    if (value == "scalar") return Backend::kScalar;
    if (value == "avx2" && cpu_has_avx2()) return Backend::kAvx2;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  return backend == Backend::kScalar || cpu_has_avx2();
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("SIMD backend not available on this CPU: " +
                                std::string(backend_name(backend)));
  }
  backend_slot().store(backend, std::memory_order_relaxed);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = std::min(x.size(), y.size());
#if ODPD_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::kAvx2) return avx2::axpy(a, x.data(), y.data(), n);
#endif
  scalar::axpy(a, x.data(), y.data(), n);
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
#if ODPD_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::kAvx2) return avx2::dot(x.data(), y.data(), n);
#endif
  return scalar::dot(x.data(), y.data(), n);
}

void scale(double a, std::span<double> x) {
#if ODPD_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::kAvx2) return avx2::scale(a, x.data(), x.size());
#endif
  scalar::scale(a, x.data(), x.size());
}

double max_abs(std::span<const double> x) {
#if ODPD_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::kAvx2) return avx2::max_abs(x.data(), x.size());
#endif
  return scalar::max_abs(x.data(), x.size());
}

}  // namespace odpd::kernels
