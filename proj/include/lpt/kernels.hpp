// kernels.hpp — data-parallel reduction kernels.
//
// Every inner loop of the statistics pipeline (signed block sums, block loss
// sums, quadratic block means, multiplier sums) reduces to one of the five
// kernels below over a contiguous double range. Each kernel has a scalar
// reference implementation plus SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected once at startup; the selection can be overridden through
// set_backend() or the LPT_KERNELS environment variable (scalar|avx2|neon).
//
// SIMD variants reassociate the accumulation, so results may differ from the
// scalar reference by normal floating-point roundoff; the equivalence tests
// pin that gap to a condition-scaled tolerance.
#pragma once

#include <cstddef>
#include <string>

namespace lpt::kernels {

enum class Backend { scalar, avx2, neon };

// Backend detected at startup (or forced via LPT_KERNELS / set_backend).
Backend active_backend();
const char* backend_name(Backend b);
std::string active_backend_name();

// Force a specific backend; throws std::runtime_error if this host does not
// support it. Intended for tests and the CLI --kernels flag.
void set_backend(Backend b);

// True if the instruction set is usable on this host.
bool backend_supported(Backend b);

// --- reductions ---------------------------------------------------------

// sum of x[i]
double sum(const double* x, std::size_t n);
// sum of x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);
// sum of x[i]^2
double sumsq(const double* x, std::size_t n);
// sum of (a[i]-b[i])^2
double sumsq_diff(const double* a, const double* b, std::size_t n);
// sum of c[i]*(a[i]-b[i])
double dot_diff(const double* c, const double* a, const double* b, std::size_t n);

// Scalar reference implementations, always available (used as the oracle in
// equivalence tests and for the tail of SIMD loops).
namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sumsq_diff(const double* a, const double* b, std::size_t n);
double dot_diff(const double* c, const double* a, const double* b, std::size_t n);
}  // namespace scalar

}  // namespace lpt::kernels
