// Kernel equivalence: every SIMD backend must match the scalar reference to
// condition-scaled roundoff on all alignments and tails.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpt/kernels.hpp"
#include "lpt/rng.hpp"

using namespace lpt;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    rng::CounterRng r(seed, 0xBEEF);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = scale * (2.0 * r.u01(i) - 1.0);
    return v;
}

double abs_terms_dot(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::abs(x[i] * y[i]);
    return acc;
}

const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33,
                                63, 64, 100, 255, 1000, 1023, 4096};

}  // namespace

TEST_CASE("simd backends match the scalar reference") {
    for (auto backend : {kernels::Backend::avx2, kernels::Backend::neon}) {
        if (!kernels::backend_supported(backend)) continue;
        kernels::set_backend(backend);
        INFO("backend: ", kernels::backend_name(backend));
        for (std::size_t n : kLengths) {
            const auto x = random_vec(n, 11, 3.0);
            const auto y = random_vec(n, 22, 2.0);
            const auto c = random_vec(n, 33, 1.0);
            const double cond = abs_terms_dot(x, y) + 1.0;

            CHECK(std::abs(kernels::sum(x.data(), n) - kernels::scalar::sum(x.data(), n)) <=
                  1e-13 * cond);
            CHECK(std::abs(kernels::dot(x.data(), y.data(), n) -
                           kernels::scalar::dot(x.data(), y.data(), n)) <= 1e-13 * cond);
            CHECK(std::abs(kernels::sumsq(x.data(), n) -
                           kernels::scalar::sumsq(x.data(), n)) <= 1e-13 * cond);
            CHECK(std::abs(kernels::sumsq_diff(x.data(), y.data(), n) -
                           kernels::scalar::sumsq_diff(x.data(), y.data(), n)) <=
                  1e-12 * (cond + 1.0));
            CHECK(std::abs(kernels::dot_diff(c.data(), x.data(), y.data(), n) -
                           kernels::scalar::dot_diff(c.data(), x.data(), y.data(), n)) <=
                  1e-12 * (cond + 1.0));
        }
    }
    kernels::set_backend(kernels::Backend::scalar);
}

TEST_CASE("scalar reference semantics") {
    const std::vector<double> a = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> b = {0.5, -1.0, 2.0, 0.0};
    const std::vector<double> c = {1.0, -1.0, 1.0, -1.0};
    CHECK(kernels::scalar::sum(a.data(), 4) == 10.0);
    CHECK(kernels::scalar::dot(a.data(), b.data(), 4) == doctest::Approx(0.5 - 2.0 + 6.0));
    CHECK(kernels::scalar::sumsq(a.data(), 4) == 30.0);
    // sum of (a-b)^2 = 0.25 + 9 + 1 + 16
    CHECK(kernels::scalar::sumsq_diff(a.data(), b.data(), 4) == doctest::Approx(26.25));
    // sum c*(a-b) = 0.5 - 3 + 1 - 4
    CHECK(kernels::scalar::dot_diff(c.data(), a.data(), b.data(), 4) == doctest::Approx(-5.5));
    CHECK(kernels::scalar::sum(a.data(), 0) == 0.0);
}

TEST_CASE("dot_diff agrees with dot of explicit difference") {
    const auto a = random_vec(257, 44);
    const auto b = random_vec(257, 55);
    const auto c = random_vec(257, 66);
    std::vector<double> d(257);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    const double lhs = kernels::scalar::dot_diff(c.data(), a.data(), b.data(), d.size());
    const double rhs = kernels::scalar::dot(c.data(), d.data(), d.size());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("backend forcing and detection") {
    CHECK(kernels::backend_supported(kernels::Backend::scalar));
    kernels::set_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
#if defined(__x86_64__)
    if (kernels::backend_supported(kernels::Backend::avx2)) {
        kernels::set_backend(kernels::Backend::avx2);
        CHECK(kernels::active_backend_name() == "avx2");
        kernels::set_backend(kernels::Backend::scalar);
    }
    CHECK_THROWS(kernels::set_backend(kernels::Backend::neon));
#endif
}
