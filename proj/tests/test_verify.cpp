#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpt/fixtures.hpp"
#include "lpt/rng.hpp"
#include "lpt/verify.hpp"
#include "support/test_oracles.hpp"

using namespace lpt;
using tournament::TournamentConfig;

TEST_CASE("check_club") {
    SUBCASE("singleton class is vacuous") {
        auto space = model::TabularSpace::create({0.5, 0.5});
        auto cls = model::HypothesisClass::tabular(space, {{1.0, -1.0}}, 6.0, 2.0);
        auto y = model::FunctionTable::create(space, {1.0, -1.0});
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        const auto cfg = TournamentConfig::make(6.0, 2.0, 0.04, 0.2);
        verify::VerifyOptions opts{.n_blocks = 8, .trials = 20, .seed = 1};
        const auto rep = verify::check_club(t, cfg, opts);
        CHECK(rep.confidence == 1.0);
        CHECK(rep.failures == 0);
    }
    SUBCASE("impossible sandwich (alpha > beta) fails systematically, no crash") {
        const auto fx = fixtures::two_member_pair();
        auto cfg = TournamentConfig::make(fx.cfg.p, fx.cfg.M, fx.cfg.eps, fx.cfg.delta,
                                          fx.cfg.theta1, TournamentConfig::Profile::practical,
                                          /*alpha=*/5.0, /*beta=*/1.25);
        verify::VerifyOptions opts{.n_blocks = fx.n_blocks, .trials = 40, .seed = 2};
        const auto rep = verify::check_club(fx.triplet, cfg, opts);
        CHECK(rep.confidence < 0.5);
    }
    SUBCASE("pair at distance 10r with calibrated constants") {
        const auto fx = fixtures::two_member_pair();
        verify::VerifyOptions opts{.n_blocks = fx.n_blocks, .trials = 120, .seed = 3, .jobs = 2};
        const auto [alpha, beta] = verify::calibrate_alpha_beta(fx.triplet, fx.cfg, opts);
        auto cfg = TournamentConfig::make(fx.cfg.p, fx.cfg.M, fx.cfg.eps, fx.cfg.delta,
                                          fx.cfg.theta1, TournamentConfig::Profile::practical,
                                          alpha, beta);
        verify::VerifyOptions fresh{.n_blocks = fx.n_blocks, .trials = 150, .seed = 99, .jobs = 2};
        const auto rep = verify::check_club(fx.triplet, cfg, fresh);
        CHECK(rep.confidence >= 1.0 - fx.cfg.delta / 4.0);
    }
}

TEST_CASE("calibrate_alpha_beta") {
    SUBCASE("vacuous class returns the grid extremes") {
        auto space = model::TabularSpace::create({0.5, 0.5});
        auto cls = model::HypothesisClass::tabular(space, {{1.0, -1.0}}, 6.0, 2.0);
        auto y = model::FunctionTable::create(space, {1.0, -1.0});
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        const auto cfg = TournamentConfig::make(6.0, 2.0, 0.04, 0.2);
        verify::VerifyOptions opts{.n_blocks = 8, .trials = 10, .seed = 1};
        const auto [alpha, beta] = verify::calibrate_alpha_beta(t, cfg, opts);
        CHECK(alpha == doctest::Approx(1.0));   // largest alpha
        CHECK(beta == doctest::Approx(1.25));   // smallest beta
    }
    SUBCASE("deterministic under a fixed seed") {
        const auto fx = fixtures::two_member_pair();
        verify::VerifyOptions opts{.n_blocks = fx.n_blocks, .trials = 60, .seed = 7, .jobs = 2};
        const auto ab1 = verify::calibrate_alpha_beta(fx.triplet, fx.cfg, opts);
        const auto ab2 = verify::calibrate_alpha_beta(fx.triplet, fx.cfg, opts);
        CHECK(ab1 == ab2);
    }
    SUBCASE("two-point extremal pair: some passing pair is recorded") {
        const auto fx = fixtures::two_member_pair(6.0, 2.0, 0.2, 10.0);
        verify::VerifyOptions opts{.n_blocks = fx.n_blocks, .trials = 60, .seed = 8, .jobs = 2};
        const auto [alpha, beta] = verify::calibrate_alpha_beta(fx.triplet, fx.cfg, opts);
        CHECK(alpha >= 0.05);
        CHECK(alpha <= 1.0);
        CHECK(beta >= 1.25);
        CHECK(beta <= 8.0);
    }
}

TEST_CASE("check_diamond") {
    SUBCASE("constant difference: every block passes") {
        auto space = model::TabularSpace::create({0.5, 0.5});
        auto cls =
            model::HypothesisClass::tabular(space, {{0.0, 0.0}, {1.5, 1.5}, {-1.5, 1.5}}, 6.0, 2.0);
        auto y = model::FunctionTable::create(space, {0.0, 0.0});
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        const auto cfg = TournamentConfig::make(6.0, 2.0, 0.04, 0.2);  // r = 0.2 << 1.5
        verify::VerifyOptions opts{.n_blocks = 8, .trials = 25, .seed = 4};
        const auto rep = verify::check_diamond(t, cfg, opts);
        CHECK(rep.confidence == 1.0);
        CHECK(rep.extra == 1.0);  // 0.99n version also clean
    }
    SUBCASE("nu = 0 boundary: failures reported, no crash") {
        const auto fx = fixtures::two_member_pair();
        auto cfg = TournamentConfig::make(fx.cfg.p, fx.cfg.M, fx.cfg.eps, fx.cfg.delta,
                                          fx.cfg.theta1, TournamentConfig::Profile::practical,
                                          fx.cfg.alpha, fx.cfg.beta, /*nu=*/0.0, fx.cfg.gamma);
        verify::VerifyOptions opts{.n_blocks = fx.n_blocks, .trials = 60, .seed = 5, .jobs = 2};
        const auto rep = verify::check_diamond(fx.triplet, cfg, opts);
        CHECK(rep.confidence < 1.0);
    }
}

TEST_CASE("check_heart_spade") {
    SUBCASE("noiseless target: xi = 0, both properties trivially hold") {
        const auto fx = fixtures::two_member_pair();  // zero noise rule
        verify::VerifyOptions opts{.n_blocks = fx.n_blocks, .trials = 30, .seed = 6, .jobs = 2};
        const auto [heart, spade] = verify::check_heart_spade(fx.triplet, fx.cfg, opts);
        CHECK(heart.confidence == 1.0);
        CHECK(spade.confidence == 1.0);
    }
    SUBCASE("heavy-tailed xi on the club fixture (reduced trials)") {
        auto fx = fixtures::club_suite();
        // calibrated-scale constants; the acceptance suite runs the full
        // 500-trial version
        auto cfg = TournamentConfig::make(fx.cfg.p, fx.cfg.M, fx.cfg.eps, fx.cfg.delta,
                                          fx.cfg.theta1, TournamentConfig::Profile::practical,
                                          /*alpha=*/0.35, /*beta=*/1.5);
        verify::VerifyOptions opts{.n_blocks = fx.n_blocks, .trials = 60, .seed = 11, .jobs = 2};
        const auto [heart, spade] = verify::check_heart_spade(fx.triplet, cfg, opts);
        CHECK(heart.confidence >= 1.0 - fx.cfg.delta / 4.0);
        CHECK(spade.confidence >= 1.0 - fx.cfg.delta / 4.0);
        const auto diamond = verify::check_diamond(fx.triplet, cfg, opts);
        CHECK(diamond.confidence >= 1.0 - fx.cfg.delta / 4.0);

        std::vector<verify::PropertyReport> reps = {heart, spade, diamond};
        auto club = verify::check_club(fx.triplet, cfg, opts);
        reps.push_back(club);
        // suitable verdict is the conjunction of the four confidences
        const bool verdict = verify::suitable_verdict(reps, fx.cfg.delta);
        const bool expect = club.confidence >= 0.95 && diamond.confidence >= 0.95 &&
                            heart.confidence >= 0.95 && spade.confidence >= 0.95;
        CHECK(verdict == expect);
    }
}

TEST_CASE("stable lower bound") {
    SUBCASE("ell = 0, constant |W|: always passes") {
        model::Distribution W{model::Family::sym_two_point, 1.5, 1.0};
        verify::StableLBParams params{.nu = 0.25, .ell = 0, .k = 1.0, .m = 32};
        const auto rep = verify::check_stable_lower_bound(W, params, 200, 1);
        CHECK(rep.failures == 0);
    }
    SUBCASE("ell = m: degenerate, always fails, reported") {
        model::Distribution W{model::Family::sym_two_point, 1.5, 1.0};
        verify::StableLBParams params{.nu = 0.25, .ell = 32, .k = 1.0, .m = 32};
        const auto rep = verify::check_stable_lower_bound(W, params, 100, 1);
        CHECK(rep.failures == 100);
        CHECK_THROWS(verify::check_stable_lower_bound(
            W, verify::StableLBParams{.nu = 0.25, .ell = 33, .k = 1.0, .m = 32}, 10, 1));
    }
    SUBCASE("adversarial-J reduction equals brute force over subsets") {
        rng::CounterRng r(13, 0x5B);
        for (std::size_t m : {6, 9, 12}) {
            for (std::size_t ell : {0, 1, 2, 3}) {
                std::vector<double> sq(m);
                for (std::size_t i = 0; i < m; ++i) sq[i] = std::pow(10.0, 2.0 * r.u01(m * 100 + i));
                double total = 0.0;
                for (double v : sq) total += v;
                auto sorted = sq;
                std::sort(sorted.begin(), sorted.end(), std::greater<double>());
                double removed = 0.0;
                for (std::size_t i = 0; i < ell; ++i) removed += sorted[i];
                const double reduction = total - removed;
                const double brute = test_oracles::min_remaining_sum_bruteforce(sq, ell);
                CHECK(reduction == doctest::Approx(brute).epsilon(1e-12));
            }
        }
    }
    SUBCASE("auto parameters from the integrability recipe") {
        // two-point W: Gamma = 1/sqrt(q) exactly
        model::Distribution W{model::Family::two_point, std::pow(2.0, 1.5), 0.125};
        const double gamma = verify::distribution_gamma(W, 0.03, 6.0);
        CHECK(gamma == doctest::Approx(1.0 / std::sqrt(0.125)));
        const auto params = verify::auto_stable_lb_params(0.03, gamma, 64);
        CHECK(params.nu == doctest::Approx(0.09));
        CHECK(params.ell == 0);  // floor(64*0.03/8)
        CHECK(params.k == doctest::Approx(64.0 * 0.0009 / 8.0));
    }
}

TEST_CASE("mom small ball") {
    SUBCASE("standard gaussian, m = 1: density bound c3 ~ 1.25") {
        model::Distribution W{model::Family::gaussian, 0.0, 1.0};
        const std::vector<double> grid = {0.05, 0.1, 0.2, 0.5};
        // precondition relaxed through c2 (m = 1)
        const auto rep = verify::check_mom_small_ball(W, 1, grid, 100000, 3, /*c2=*/1e-4, 2);
        CHECK(rep.c3 >= 0.8);
        // Pr(|W| <= eta) = 2 Phi(eta) - 1 <= 0.8 eta on (0, 1]
        for (const auto& row : rep.rows) {
            const double exact =
                2.0 * test_oracles::normal_cdf(rep.c3 * row.eta) - 1.0;
            CHECK(std::abs(row.prob - exact) <= 4.0 * row.stderr_ + 1e-4);
            CHECK(row.prob <= row.eta);
        }
    }
    SUBCASE("symmetric +-1, m = 100: binomial enumeration oracle") {
        model::Distribution W{model::Family::sym_two_point, 1.0, 1.0};
        const std::vector<double> grid = {0.5, 0.9};
        const auto rep = verify::check_mom_small_ball(W, 100, grid, 100000, 4, 1.0, 2);
        // at c3 = 1 (if selected lower, recompute target):
        // Pr(|S_m/sqrt(m)| <= c3 * 0.5) with S_m = 2 Bin(100, 1/2) - 100
        const double thr = rep.c3 * 0.5 * 1.0;
        const double half_width = thr * std::sqrt(100.0) / 2.0;  // |B - 50| <= ...
        const std::size_t lo = static_cast<std::size_t>(std::ceil(50.0 - half_width));
        const std::size_t hi = static_cast<std::size_t>(std::floor(50.0 + half_width));
        const double oracle = test_oracles::binomial_range_prob(100, 0.5, lo, hi);
        CHECK(std::abs(rep.rows[0].prob - oracle) <= 4.0 * rep.rows[0].stderr_ + 1e-4);
    }
    SUBCASE("precondition violation raises") {
        model::Distribution W{model::Family::two_point, std::pow(2.0, 1.5), 0.125};
        const std::vector<double> grid = {0.05};
        CHECK_THROWS(verify::check_mom_small_ball(W, 100, grid, 100, 1, 1.0));
    }
}

TEST_CASE("multiplier norm bound") {
    SUBCASE("h = 0: both sides zero") {
        model::Distribution zero{model::Family::two_point, 0.0, 1.0};
        model::Distribution xi{model::Family::two_point, 1.0, 0.5};
        const auto rep = verify::check_multiplier_norm(xi, zero, 6.0, 2.0);
        CHECK(rep.lhs == 0.0);
        CHECK(rep.bound == 0.0);
        CHECK(rep.ok);
        CHECK(rep.ratio == 0.0);
    }
    SUBCASE("independent two-point xi, h at p = 6, M = 2") {
        const double K = std::pow(2.0, 1.5);
        model::Distribution xi{model::Family::two_point, K, 0.125};
        model::Distribution h{model::Family::two_point, K, 0.125};
        const auto rep = verify::check_multiplier_norm(xi, h, 6.0, 2.0);
        // product-space: E xi^2 h^2 = (K^2/8)^2 = 1 -> lhs = 1
        CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.c == doctest::Approx(std::pow(2.0, 1.5) + 1.0));
        CHECK(rep.ok);
        CHECK(rep.ratio <= 1.0);
    }
    SUBCASE("constant xi = M") {
        model::Distribution xi{model::Family::two_point, 2.0, 1.0};
        model::Distribution h{model::Family::two_point, std::pow(2.0, 1.5), 0.125};
        const auto rep = verify::check_multiplier_norm(xi, h, 6.0, 2.0);
        // ||xi h|| = M ||h||_2 = 2 * 1
        CHECK(rep.lhs == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(rep.ok);
    }
    SUBCASE("violated precondition raises") {
        model::Distribution xi{model::Family::two_point, 5.0, 1.0};  // ||xi||_6 = 5 > M
        model::Distribution h{model::Family::two_point, 1.0, 0.5};
        CHECK_THROWS(verify::check_multiplier_norm(xi, h, 6.0, 2.0));
    }
}

TEST_CASE("diamond ground truth: block means of (h-h*)^2 are unbiased") {
    const auto fx = fixtures::two_member_pair();
    const auto& cls = fx.triplet.cls();
    const double d = std::sqrt(verify::excess_risk(fx.triplet, 1));  // noiseless: excess = dist^2
    const std::size_t m = fx.cfg.m;
    const std::size_t trials = 400;
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto s = sampler::draw_sample(fx.triplet, m, 17, trial);
        std::vector<double> v0(m), v1(m);
        sampler::evaluate_member(cls, 0, s, v0.data());
        sampler::evaluate_member(cls, 1, s, v1.data());
        double q = 0.0;
        for (std::size_t i = 0; i < m; ++i) q += (v1[i] - v0[i]) * (v1[i] - v0[i]);
        q /= static_cast<double>(m);
        acc += q;
        acc2 += q * q;
    }
    const double mean = acc / trials;
    const double se =
        std::sqrt(std::max(0.0, acc2 / trials - mean * mean) / static_cast<double>(trials));
    CHECK(std::abs(mean - d * d) <= 3.0 * se);
}

TEST_CASE("excess risk") {
    auto space = model::TabularSpace::create({0.2, 0.3, 0.5});

    SUBCASE("f = f* gives exactly zero; shifted member gives c^2") {
        const double c = 0.75;
        auto cls = model::HypothesisClass::tabular(
            space, {{1.0, -1.0, 0.5}, {1.0 + c, -1.0 + c, 0.5 + c}}, 6.0, 8.0);
        auto y = model::FunctionTable::create(space, {1.0, -1.0, 0.5});
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        CHECK(t.fstar() == 0);
        CHECK(verify::excess_risk(t, 0) == 0.0);
        CHECK(verify::excess_risk(t, 1) == doctest::Approx(c * c).epsilon(1e-12));
    }
    SUBCASE("random member vs hand enumeration over atoms") {
        auto cls = model::HypothesisClass::tabular(
            space, {{0.1, 0.2, -0.3}, {1.2, -0.4, 0.8}}, 6.0, 8.0);
        auto y = model::FunctionTable::create(space, {0.0, 0.1, -0.2});
        const auto t = model::Triplet::make(std::move(cls), std::move(y));
        // hand enumeration: risks over the three atoms
        auto risk = [&](const std::vector<double>& v) {
            return 0.2 * (v[0] - 0.0) * (v[0] - 0.0) + 0.3 * (v[1] - 0.1) * (v[1] - 0.1) +
                   0.5 * (v[2] + 0.2) * (v[2] + 0.2);
        };
        const double expected = risk({1.2, -0.4, 0.8}) - risk({0.1, 0.2, -0.3});
        CHECK(verify::excess_risk(t, 1) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(verify::excess_risk(t, 0) >= -1e-9);
    }
}
