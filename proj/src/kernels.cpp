// Runtime backend selection for the reduction kernels.
#include "lpt/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace lpt::kernels {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum(const double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double sumsq(const double*, std::size_t);
double sumsq_diff(const double*, const double*, std::size_t);
double dot_diff(const double*, const double*, const double*, std::size_t);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double sum(const double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double sumsq(const double*, std::size_t);
double sumsq_diff(const double*, const double*, std::size_t);
double dot_diff(const double*, const double*, const double*, std::size_t);
}  // namespace neon
#endif

namespace {

struct Vtable {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    double (*sumsq_diff)(const double*, const double*, std::size_t);
    double (*dot_diff)(const double*, const double*, const double*, std::size_t);
};

constexpr Vtable kScalar{scalar::sum, scalar::dot, scalar::sumsq, scalar::sumsq_diff,
                         scalar::dot_diff};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Vtable kAvx2{avx2::sum, avx2::dot, avx2::sumsq, avx2::sumsq_diff, avx2::dot_diff};
#endif
#if defined(__aarch64__)
constexpr Vtable kNeon{neon::sum, neon::dot, neon::sumsq, neon::sumsq_diff, neon::dot_diff};
#endif

const Vtable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return &kScalar;
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2: return &kAvx2;
#endif
#if defined(__aarch64__)
        case Backend::neon: return &kNeon;
#endif
        default: return nullptr;
    }
}

Backend detect() {
    if (const char* env = std::getenv("LPT_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::avx2))
            return Backend::avx2;
        if (std::strcmp(env, "neon") == 0 && backend_supported(Backend::neon))
            return Backend::neon;
        return Backend::scalar;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (backend_supported(Backend::avx2)) return Backend::avx2;
#endif
#if defined(__aarch64__)
    return Backend::neon;
#endif
    return Backend::scalar;
}

struct State {
    std::atomic<Backend> backend;
    std::atomic<const Vtable*> vt;
    State() {
        const Backend b = detect();
        backend.store(b);
        vt.store(table_for(b));
    }
};

State& state() {
    static State s;
    return s;
}

}  // namespace

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend active_backend() { return state().backend.load(); }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

std::string active_backend_name() { return backend_name(active_backend()); }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::runtime_error(std::string("kernel backend not supported on this host: ") +
                                 backend_name(b));
    state().backend.store(b);
    state().vt.store(table_for(b));
}

double sum(const double* x, std::size_t n) { return state().vt.load()->sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) {
    return state().vt.load()->dot(x, y, n);
}
double sumsq(const double* x, std::size_t n) { return state().vt.load()->sumsq(x, n); }
double sumsq_diff(const double* a, const double* b, std::size_t n) {
    return state().vt.load()->sumsq_diff(a, b, n);
}
double dot_diff(const double* c, const double* a, const double* b, std::size_t n) {
    return state().vt.load()->dot_diff(c, a, b, n);
}

}  // namespace lpt::kernels
