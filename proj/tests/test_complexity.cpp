#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lpt/complexity.hpp"
#include "lpt/norms.hpp"
#include "support/test_oracles.hpp"

using namespace lpt;
using complexity::Kind;

namespace {

// tabular triplet on a 2-atom space with explicit member rows and Y table
model::Triplet small_triplet(const std::vector<std::vector<double>>& rows,
                             const std::vector<double>& probs, const std::vector<double>& y) {
    auto space = model::TabularSpace::create(probs);
    auto cls = model::HypothesisClass::tabular(space, rows, 6.0, 50.0);
    auto target = model::FunctionTable::create(space, y);
    return model::Triplet::make(std::move(cls), std::move(target));
}

// projected hull rows for the exhaustive oracle
std::vector<std::vector<double>> hull_rows(const model::HypothesisClass& cls, std::size_t center,
                                           double r) {
    std::vector<std::vector<double>> rows;
    for (std::size_t u = 0; u < cls.size(); ++u)
        rows.push_back(complexity::star_project(cls, u, center, r));
    return rows;
}

}  // namespace

TEST_CASE("star projection") {
    const auto t = small_triplet({{0.0, 0.0}, {2.0, -1.0}}, {0.5, 0.5}, {0.0, 0.0});
    const auto& cls = t.cls();
    const double d = complexity::member_distance(cls, 1, 0);
    CHECK(d == doctest::Approx(std::sqrt(0.5 * 4.0 + 0.5 * 1.0)));

    SUBCASE("inside the ball: unchanged") {
        const auto v = complexity::star_project(cls, 1, 0, 2.0 * d);
        CHECK(v[0] == 2.0);
        CHECK(v[1] == -1.0);
    }
    SUBCASE("at distance 2r: halved, norm exactly r") {
        const auto v = complexity::star_project(cls, 1, 0, d / 2.0);
        CHECK(v[0] == doctest::Approx(1.0));
        CHECK(v[1] == doctest::Approx(-0.5));
        CHECK(norms::lq_norm(v, cls.space()->probs(), 2.0) == doctest::Approx(d / 2.0));
    }
    SUBCASE("u = center: zero function") {
        const auto v = complexity::star_project(cls, 0, 0, 1.0);
        CHECK(v == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("hull query invariants") {
        const auto q = complexity::star_hull(cls, 0, d / 3.0);
        CHECK(q.lambda[0] == 1.0);  // zero distance: unshrunk by convention
        CHECK(q.lambda[1] == doctest::Approx(1.0 / 3.0));
        for (std::size_t u = 0; u < cls.size(); ++u)
            CHECK(q.lambda[u] * q.dist[u] <= q.r * (1.0 + 1e-9));
    }
}

TEST_CASE("oscillation: degenerate hull is exactly zero") {
    const auto t = small_triplet({{1.0, -1.0}}, {0.5, 0.5}, {1.0, -1.0});
    const auto est = complexity::estimate_oscillation(t, 0, 1.0, 8, 16, Kind::quadratic, 1);
    CHECK(est.value == 0.0);
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("oscillation matches exhaustive enumeration (quadratic and multiplier)") {
    // 2 atoms, 2 members, N = 4: enumeration over 2^4 sign patterns x 2^4
    // atom assignments
    const auto t =
        small_triplet({{0.0, 0.0}, {3.0, -1.0}}, {0.25, 0.75}, {0.5, -0.5});
    const double d = complexity::member_distance(t.cls(), 1, 0);
    const double r = d;  // lambda = 1

    for (Kind kind : {Kind::quadratic, Kind::multiplier}) {
        // oracle: hull = {0, u1 - u0}; xi = f*(x) - y(x) per atom
        std::vector<double> xi_row(2);
        const auto fs = t.cls().row(t.fstar());
        for (std::size_t a = 0; a < 2; ++a) xi_row[a] = fs[a] - t.target_table().values()[a];
        const double oracle = test_oracles::exhaustive_oscillation(
            *t.cls().space(), hull_rows(t.cls(), 0, r),
            kind == Kind::multiplier ? &xi_row : nullptr, 4);

        const auto est = complexity::estimate_oscillation(t, 0, r, 4, 4000, kind, 7);
        INFO(complexity::kind_name(kind), ": oracle ", oracle, " vs ", est.value, " +- ",
             est.stderr_);
        CHECK(std::abs(est.value - oracle) <= 3.0 * est.stderr_);
    }
}

TEST_CASE("phi(r) nonincreasing under common random numbers") {
    const auto t = small_triplet({{0.0, 0.0}, {3.0, -1.0}, {-1.0, 2.0}}, {0.25, 0.75},
                                 {0.0, 0.0});
    double prev = 1e300;
    for (double r : {0.1, 0.3, 0.9, 2.7}) {
        const auto est = complexity::estimate_oscillation(t, 0, r, 16, 200, Kind::quadratic, 3);
        const double phi = est.value / r;
        CHECK(phi <= prev * (1.0 + 1e-12));
        prev = phi;
    }
}

TEST_CASE("fixed point search") {
    SUBCASE("single-member class collapses to r_lo") {
        const auto t = small_triplet({{1.0, 2.0}}, {0.5, 0.5}, {1.0, 2.0});
        complexity::SearchOptions opts;
        opts.r_lo = 0.01;
        const auto res = complexity::fixed_point(t, 0, 0.5, Kind::quadratic, 16, opts);
        CHECK(res.r_star == 0.01);
    }
    SUBCASE("monotone in kappa") {
        const auto t = small_triplet({{0.0, 0.0}, {3.0, -1.0}, {-1.0, 2.0}}, {0.25, 0.75},
                                     {0.0, 0.0});
        complexity::SearchOptions opts;
        opts.seed = 5;
        opts.trials = 128;
        opts.rel_width = 0.05;  // coarse bracket keeps the probes separable
        const auto r1 = complexity::fixed_point(t, 0, 0.2, Kind::quadratic, 8, opts);
        const auto r2 = complexity::fixed_point(t, 0, 0.4, Kind::quadratic, 8, opts);
        CHECK(r2.r_star <= r1.r_star * (1.0 + 1e-9));
        CHECK(r1.bracket_hi <= r1.bracket_lo * 1.0501);
        CHECK(r2.bracket_hi <= r2.bracket_lo * 1.0501);
    }
    SUBCASE("agrees with the exhaustive-enumeration oracle within the bracket") {
        const auto t = small_triplet({{0.0, 0.0}, {2.0, -2.0}}, {0.5, 0.5}, {0.0, 0.0});
        const std::size_t N = 4;
        auto exact_phi = [&](double r) {
            std::vector<std::vector<double>> rows;
            for (std::size_t u = 0; u < t.cls().size(); ++u)
                rows.push_back(complexity::star_project(t.cls(), u, 0, r));
            return test_oracles::exhaustive_oscillation(*t.cls().space(), rows, nullptr, N) / r;
        };
        const double d = complexity::member_distance(t.cls(), 1, 0);
        // kappa placed in the 1/r decay region (r > d): healthy slope
        const double kappa = exact_phi(1.5 * d) * 0.8;
        double lo = 0.05, hi = 8.0 * d;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            (exact_phi(mid) <= kappa ? hi : lo) = mid;
        }
        const double r_exact = hi;

        complexity::SearchOptions opts;
        opts.seed = 21;
        opts.trials = 512;
        // probes near the crossing need tight stderr; trials are cheap at N=4
        opts.trials_cap = std::size_t{1} << 23;
        const auto res = complexity::fixed_point(t, 0, kappa, Kind::quadratic, N, opts);
        CHECK(res.bracket_hi <= res.bracket_lo * 1.0101);  // default 1e-2 width
        // oracle fixed point inside (or within noise of) the returned bracket
        CHECK(r_exact <= res.bracket_hi * 1.02);
        CHECK(r_exact >= res.bracket_lo * 0.98);
    }
    SUBCASE("r_hi too small raises") {
        const auto t = small_triplet({{0.0, 0.0}, {30.0, -10.0}}, {0.25, 0.75}, {0.0, 0.0});
        complexity::SearchOptions opts;
        opts.r_hi = 1e-4;
        opts.r_lo = 1e-5;
        CHECK_THROWS_WITH_AS(complexity::fixed_point(t, 0, 1e-9, Kind::quadratic, 4, opts),
                             doctest::Contains("increase r_hi"), std::runtime_error);
    }
}

TEST_CASE("sample complexity search") {
    SUBCASE("single-member class: N* = 1") {
        const auto t = small_triplet({{1.0, 2.0}}, {0.5, 0.5}, {1.0, 2.0});
        const auto res = complexity::sample_complexity(t, 1.0, 0.5, Kind::quadratic);
        CHECK(res.N_star == 1);
    }
    SUBCASE("monotone in kappa and exact against enumeration") {
        const auto t = small_triplet({{0.0, 0.0}, {2.0, -2.0}}, {0.5, 0.5}, {0.0, 0.0});
        const double r = complexity::member_distance(t.cls(), 1, 0);  // lambda = 1
        const auto rows = hull_rows(t.cls(), 0, r);

        // exact oscillation per N from the enumeration oracle
        double osc[9];
        for (std::size_t N = 1; N <= 8; ++N)
            osc[N] = test_oracles::exhaustive_oscillation(*t.cls().space(), rows, nullptr, N);
        // choose kappa with a clear gap around N* = 4
        REQUIRE(osc[4] < osc[3]);
        const double kappa = 0.5 * (osc[4] + osc[3]) / r;
        std::size_t n_exact = 1;
        while (n_exact <= 8 && osc[n_exact] > kappa * r) ++n_exact;

        complexity::SearchOptions opts;
        opts.seed = 11;
        opts.trials = 256;
        const auto res = complexity::sample_complexity(t, r, kappa, Kind::quadratic, opts);
        CHECK(res.N_star == n_exact);

        const auto res2 =
            complexity::sample_complexity(t, r, kappa * 0.7, Kind::quadratic, opts);
        CHECK(res2.N_star >= res.N_star);
        CHECK(res.at_half.N == std::max<std::size_t>(1, res.N_star / 2));
    }
    SUBCASE("unreachable target raises with phi report") {
        const auto t = small_triplet({{0.0, 0.0}, {4.0, -4.0}}, {0.5, 0.5}, {0.0, 0.0});
        complexity::SearchOptions opts;
        opts.N_max = 8;
        opts.trials = 64;
        CHECK_THROWS_WITH_AS(
            complexity::sample_complexity(t, 1.0, 1e-6, Kind::quadratic, opts),
            doctest::Contains("not reached by N_max"), std::runtime_error);
    }
}

TEST_CASE("noise discipline raises when the target cannot be separated") {
    const auto t = small_triplet({{0.0, 0.0}, {2.0, -2.0}}, {0.5, 0.5}, {0.0, 0.0});
    const double r = complexity::member_distance(t.cls(), 1, 0);
    const auto rows = hull_rows(t.cls(), 0, r);
    const double exact = test_oracles::exhaustive_oscillation(*t.cls().space(), rows, nullptr, 4);
    complexity::SearchOptions opts;
    opts.trials = 16;
    opts.trials_cap = 32;  // tiny cap: the 2-stderr band cannot clear kappa*r
    CHECK_THROWS_WITH_AS(
        complexity::sample_complexity(t, r, exact / r, Kind::quadratic, opts),
        doctest::Contains("increase trials"), std::runtime_error);
}

TEST_CASE("sample size recipe") {
    SUBCASE("confidence addend: eps = M^2, p = 6, delta = 2/e") {
        const auto t = small_triplet({{1.0, 1.0}}, {0.5, 0.5}, {1.0, 1.0});
        const auto rep =
            complexity::sample_size_recipe(t, /*eps=*/2500.0, 2.0 / std::numbers::e, 1, 1, 1);
        // (M^2/eps)^{p/(p-2)} log(2/delta) = 1 * 1 (class M = 50 in the helper)
        CHECK(rep.confidence_addend == doctest::Approx(1.0));
        // singleton class: N_Q = N_M = 1, N0 = c0 (2 + 1)
        CHECK(rep.N_Q == 1);
        CHECK(rep.N_M == 1);
        CHECK(rep.N0 == doctest::Approx(3.0));
    }
    SUBCASE("halving eps scales the addend by 2^{p/(p-2)}") {
        const auto t = small_triplet({{1.0, 1.0}}, {0.5, 0.5}, {1.0, 1.0});
        const auto r1 = complexity::sample_size_recipe(t, 2500.0, 0.1, 1, 1, 1);
        const auto r2 = complexity::sample_size_recipe(t, 1250.0, 0.1, 1, 1, 1);
        CHECK(r2.confidence_addend / r1.confidence_addend ==
              doctest::Approx(std::pow(2.0, 1.5)));
    }
    SUBCASE("unrestricted branch enumerates subsets for |F| <= 5") {
        const auto t = small_triplet({{0.0, 0.0}, {1.0, -1.0}}, {0.5, 0.5}, {0.0, 0.0});
        complexity::SearchOptions opts;
        opts.trials = 64;
        // generous constants: every subset resolves at N* = 1, leaving the
        // enumeration bookkeeping as the thing under test
        const auto rep = complexity::sample_size_recipe(t, 1.0, 0.1, 1, 1000, 1000, opts, true);
        CHECK(rep.unrestricted);
        CHECK(rep.subset_sup_exact);
        // bar F has 3 members; subsets containing f*: 2^2 = 4
        CHECK(rep.subsets_checked == 4);
        CHECK(rep.N_Q == 1);
        CHECK(rep.N_M == 1);
    }
}
