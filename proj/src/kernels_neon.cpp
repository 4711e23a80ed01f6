// NEON kernel variants for aarch64 (float64x2 lanes, baseline on ARMv8).
#if defined(__aarch64__)

#include <arm_neon.h>

#include "lpt/kernels.hpp"

namespace lpt::kernels::neon {

double sum(const double* x, std::size_t n) {
    std::size_t i = 0;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    return acc + scalar::sum(x + i, n - i);
}

double dot(const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    return acc + scalar::dot(x + i, y + i, n - i);
}

double sumsq(const double* x, std::size_t n) {
    std::size_t i = 0;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (; i + 4 <= n; i += 4) {
        const float64x2_t a = vld1q_f64(x + i);
        const float64x2_t b = vld1q_f64(x + i + 2);
        acc0 = vfmaq_f64(acc0, a, a);
        acc1 = vfmaq_f64(acc1, b, b);
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    return acc + scalar::sumsq(x + i, n - i);
}

double sumsq_diff(const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    return acc + scalar::sumsq_diff(a + i, b + i, n - i);
}

double dot_diff(const double* c, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (; i + 4 <= n; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, vld1q_f64(c + i), d0);
        acc1 = vfmaq_f64(acc1, vld1q_f64(c + i + 2), d1);
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    return acc + scalar::dot_diff(c + i, a + i, b + i, n - i);
}

}  // namespace lpt::kernels::neon

#endif  // __aarch64__
