#pragma once
// Dense vector kernels used by the simplex tableau updates.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The active variant is chosen once at startup from the
// CPU feature flags and can be overridden with ODPD_SIMD=scalar|avx2 or
// set_backend() (tests use this to compare both paths).

#include <cstddef>
#include <span>
#include <string_view>

namespace odpd::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend backend);

// True when the CPU (and the build) can run the given backend.
bool backend_available(Backend backend);

Backend active_backend();

// Throws std::invalid_argument if the backend is not available.
void set_backend(Backend backend);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> x, std::span<const double> y);

// x *= a
void scale(double a, std::span<double> x);

// Largest |x_i|; 0 for an empty span.
double max_abs(std::span<const double> x);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define ODPD_HAVE_AVX2_KERNELS 1
namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
}  // namespace avx2
#else
#define ODPD_HAVE_AVX2_KERNELS 0
#endif

}  // namespace odpd::kernels
