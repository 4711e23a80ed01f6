#include "lpt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lpt/blocks_mom.hpp"
#include "lpt/complexity.hpp"
#include "lpt/kernels.hpp"
#include "lpt/norms.hpp"
#include "lpt/parallel.hpp"
#include "lpt/report.hpp"
#include "lpt/rng.hpp"
#include "lpt/sampler.hpp"

namespace lpt::verify {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

void require_tabular(const model::Triplet& t, const char* what) {
    require(t.cls().backend() == model::HypothesisClass::Backend::tabular,
            std::string(what) + ": tabular backend required (exact ground truth)");
}

// Substream namespaces per property so the checks never share draws.
constexpr std::uint64_t kClubBase = std::uint64_t{1} << 32;
constexpr std::uint64_t kDiamondBase = std::uint64_t{2} << 32;
constexpr std::uint64_t kHeartBase = std::uint64_t{3} << 32;
constexpr std::uint64_t kStableBase = std::uint64_t{4} << 32;
constexpr std::uint64_t kSmallBallBase = std::uint64_t{5} << 32;

std::vector<double> member_distances(const model::Triplet& t) {
    const auto& cls = t.cls();
    std::vector<double> d(cls.size());
    for (std::size_t g = 0; g < cls.size(); ++g)
        d[g] = complexity::member_distance(cls, g, t.fstar());
    return d;
}

PropertyReport base_report(const std::string& property, const tournament::TournamentConfig& cfg,
                           const VerifyOptions& opts) {
    PropertyReport rep;
    rep.property = property;
    rep.trials = opts.trials;
    rep.alpha = cfg.alpha;
    rep.beta = cfg.beta;
    rep.gamma = cfg.gamma;
    rep.nu = cfg.nu;
    rep.r = cfg.r();
    rep.m = cfg.m;
    rep.n = opts.n_blocks;
    return rep;
}

// Per-trial Psi(h, h*) for every member: trials x K matrix.
std::vector<double> club_psi_matrix(const model::Triplet& t,
                                    const tournament::TournamentConfig& cfg,
                                    const VerifyOptions& opts) {
    const auto& cls = t.cls();
    const std::size_t K = cls.size();
    const std::size_t N = opts.n_blocks * cfg.m;
    const std::size_t hstar = t.fstar();
    std::vector<double> psis(opts.trials * K, 0.0);
    parallel::parallel_for(opts.trials, opts.jobs, [&](std::size_t trial) {
        const auto s = sampler::draw_sample(t, N, opts.seed, kClubBase + trial);
        const auto signs = sampler::draw_signs(N, opts.seed, kClubBase + trial);
        const auto part = sampler::partition(N, cfg.m);
        const auto ev = sampler::evaluate(cls, s);
        // signed block sums per member
        std::vector<double> S(K * part.n);
        for (std::size_t g = 0; g < K; ++g)
            for (std::size_t j = 0; j < part.n; ++j)
                S[g * part.n + j] = kernels::dot(signs.signs.data() + part.begin(j),
                                                 ev.row(g) + part.begin(j), part.m);
        const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(part.m));
        std::vector<double> mu(part.n);
        for (std::size_t g = 0; g < K; ++g) {
            for (std::size_t j = 0; j < part.n; ++j)
                mu[j] = std::abs(S[g * part.n + j] - S[hstar * part.n + j]) * inv_sqrt_m;
            psis[trial * K + g] = blocks_mom::lower_median(mu);
        }
    });
    return psis;
}

// (club) violation test for one trial row of Psi values.
bool club_trial_fails(std::span<const double> psi_row, std::span<const double> dist, double alpha,
                      double beta, double r, std::size_t hstar) {
    for (std::size_t g = 0; g < psi_row.size(); ++g) {
        if (g == hstar) continue;
        const double psi = psi_row[g];
        const double d = dist[g];
        if (psi >= beta * r) {
            if (!(psi / beta <= d && d <= psi / alpha)) return true;
        } else {
            if (!(d <= (beta / alpha) * r)) return true;
        }
    }
    return false;
}

}  // namespace

PropertyReport check_club(const model::Triplet& t, const tournament::TournamentConfig& cfg,
                          const VerifyOptions& opts) {
    require_tabular(t, "check_club");
    require(opts.trials >= 1, "check_club: trials >= 1");
    const auto dist = member_distances(t);
    const auto psis = club_psi_matrix(t, cfg, opts);
    const std::size_t K = t.cls().size();

    PropertyReport rep = base_report("club", cfg, opts);
    for (std::size_t trial = 0; trial < opts.trials; ++trial)
        if (club_trial_fails({psis.data() + trial * K, K}, dist, cfg.alpha, cfg.beta, cfg.r(),
                             t.fstar()))
            ++rep.failures;
    rep.confidence = 1.0 - static_cast<double>(rep.failures) / static_cast<double>(opts.trials);
    return rep;
}

std::pair<double, double> calibrate_alpha_beta(const model::Triplet& t,
                                               const tournament::TournamentConfig& cfg,
                                               const VerifyOptions& opts) {
    require_tabular(t, "calibrate_alpha_beta");
    const auto dist = member_distances(t);
    const auto psis = club_psi_matrix(t, cfg, opts);
    const std::size_t K = t.cls().size();
    const double target = 1.0 - cfg.delta / 4.0;

    auto confidence = [&](double alpha, double beta) {
        std::size_t failures = 0;
        for (std::size_t trial = 0; trial < opts.trials; ++trial)
            if (club_trial_fails({psis.data() + trial * K, K}, dist, alpha, beta, cfg.r(),
                                 t.fstar()))
                ++failures;
        return 1.0 - static_cast<double>(failures) / static_cast<double>(opts.trials);
    };

    double best_conf = -1.0, best_alpha = 0.0, best_beta = 0.0;
    // smallest beta, then largest alpha, reaching the target confidence
    for (int bi = 0; bi <= 27; ++bi) {
        const double beta = 1.25 + 0.25 * bi;  // 1.25, 1.5, ..., 8
        for (int ai = 20; ai >= 1; --ai) {
            const double alpha = 0.05 * ai;  // 1.00 down to 0.05
            const double conf = confidence(alpha, beta);
            if (conf > best_conf) {
                best_conf = conf;
                best_alpha = alpha;
                best_beta = beta;
            }
            if (conf >= target) return {alpha, beta};
        }
    }
    throw std::runtime_error("calibrate_alpha_beta: no grid point reaches confidence " +
                             report::fmt(target) + "; best was alpha=" + report::fmt(best_alpha) +
                             " beta=" + report::fmt(best_beta) +
                             " confidence=" + report::fmt(best_conf));
}

PropertyReport check_diamond(const model::Triplet& t, const tournament::TournamentConfig& cfg,
                             const VerifyOptions& opts) {
    require_tabular(t, "check_diamond");
    const auto& cls = t.cls();
    const std::size_t K = cls.size();
    const std::size_t N = opts.n_blocks * cfg.m;
    const std::size_t hstar = t.fstar();
    const auto dist = member_distances(t);
    const double r = cfg.r();

    std::vector<std::uint8_t> fail(opts.trials, 0), fail99(opts.trials, 0);
    parallel::parallel_for(opts.trials, opts.jobs, [&](std::size_t trial) {
        const auto s = sampler::draw_sample(t, N, opts.seed, kDiamondBase + trial);
        const auto part = sampler::partition(N, cfg.m);
        const auto ev = sampler::evaluate(cls, s);
        const double inv_m = 1.0 / static_cast<double>(part.m);
        for (std::size_t g = 0; g < K; ++g) {
            if (g == hstar || dist[g] < r) continue;
            const double threshold = (1.0 - cfg.nu) * dist[g] * dist[g];
            std::size_t count = 0;
            for (std::size_t j = 0; j < part.n; ++j) {
                const double q = kernels::sumsq_diff(ev.row(g) + part.begin(j),
                                                     ev.row(hstar) + part.begin(j), part.m) *
                                 inv_m;
                if (q >= threshold) ++count;
            }
            if (2 * count <= part.n) fail[trial] = 1;
            if (static_cast<double>(count) < 0.99 * static_cast<double>(part.n))
                fail99[trial] = 1;
        }
    });

    PropertyReport rep = base_report("diamond", cfg, opts);
    std::size_t f99 = 0;
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        rep.failures += fail[trial];
        f99 += fail99[trial];
    }
    rep.confidence = 1.0 - static_cast<double>(rep.failures) / static_cast<double>(opts.trials);
    rep.extra_name = "confidence_099n";
    rep.extra = 1.0 - static_cast<double>(f99) / static_cast<double>(opts.trials);
    return rep;
}

std::pair<PropertyReport, PropertyReport> check_heart_spade(
    const model::Triplet& t, const tournament::TournamentConfig& cfg, const VerifyOptions& opts) {
    require_tabular(t, "check_heart_spade");
    const auto& cls = t.cls();
    const auto& space = *cls.space();
    const std::size_t K = cls.size();
    const std::size_t A = space.atom_count();
    const std::size_t N = opts.n_blocks * cfg.m;
    const std::size_t hstar = t.fstar();
    const auto dist = member_distances(t);
    const double r = cfg.r();

    // Exact E M_{h,h*} = 2 E[xi (h-h*)], xi = h*(X) - Y.
    const auto hs = cls.row(hstar);
    std::vector<double> em(K, 0.0);
    if (t.target_is_table()) {
        const auto& y = t.target_table().values();
        for (std::size_t g = 0; g < K; ++g) {
            const auto row = cls.row(g);
            double acc = 0.0;
            for (std::size_t a = 0; a < A; ++a)
                acc += space.prob(a) * (hs[a] - y[a]) * (row[a] - hs[a]);
            em[g] = 2.0 * acc;
        }
    } else {
        const auto& rule = t.target_rule();
        const auto f0 = cls.row(rule.f0_index);
        const double noise_mean = rule.noise.dist().mean();
        for (std::size_t g = 0; g < K; ++g) {
            const auto row = cls.row(g);
            double acc = 0.0, lin = 0.0;
            for (std::size_t a = 0; a < A; ++a) {
                acc += space.prob(a) * (hs[a] - f0[a]) * (row[a] - hs[a]);
                lin += space.prob(a) * (row[a] - hs[a]);
            }
            em[g] = 2.0 * (acc - noise_mean * lin);
        }
    }

    std::vector<std::uint8_t> heart_fail(opts.trials, 0), heart_fail99(opts.trials, 0);
    std::vector<std::uint8_t> spade_fail(opts.trials, 0), spade_fail99(opts.trials, 0);
    parallel::parallel_for(opts.trials, opts.jobs, [&](std::size_t trial) {
        const auto s = sampler::draw_sample(t, N, opts.seed, kHeartBase + trial);
        const auto part = sampler::partition(N, cfg.m);
        const auto ev = sampler::evaluate(cls, s);
        std::vector<double> xi(N);
        for (std::size_t i = 0; i < N; ++i) xi[i] = ev.row(hstar)[i] - s.y[i];
        const double two_over_m = 2.0 / static_cast<double>(part.m);
        std::vector<double> mstat(part.n);
        for (std::size_t g = 0; g < K; ++g) {
            const bool heart_applies = g != hstar && dist[g] >= r;
            const bool spade_applies = dist[g] <= (cfg.beta / cfg.alpha) * r;
            if (!heart_applies && !spade_applies) continue;
            for (std::size_t j = 0; j < part.n; ++j)
                mstat[j] = two_over_m * kernels::dot_diff(xi.data() + part.begin(j),
                                                          ev.row(g) + part.begin(j),
                                                          ev.row(hstar) + part.begin(j), part.m);
            if (heart_applies) {
                const double threshold = -cfg.nu * dist[g] * dist[g];
                std::size_t count = 0;
                for (std::size_t j = 0; j < part.n; ++j)
                    if (mstat[j] - em[g] >= threshold) ++count;
                if (2 * count <= part.n) heart_fail[trial] = 1;
                if (static_cast<double>(count) < 0.99 * static_cast<double>(part.n))
                    heart_fail99[trial] = 1;
            }
            if (spade_applies) {
                const double bound = cfg.gamma * cfg.eps;
                std::size_t count = 0;
                for (std::size_t j = 0; j < part.n; ++j)
                    if (std::abs(mstat[j] - em[g]) <= bound) ++count;
                if (2 * count <= part.n) spade_fail[trial] = 1;
                if (static_cast<double>(count) < 0.99 * static_cast<double>(part.n))
                    spade_fail99[trial] = 1;
            }
        }
    });

    PropertyReport heart = base_report("heart", cfg, opts);
    PropertyReport spade = base_report("spade", cfg, opts);
    std::size_t h99 = 0, s99 = 0;
    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        heart.failures += heart_fail[trial];
        spade.failures += spade_fail[trial];
        h99 += heart_fail99[trial];
        s99 += spade_fail99[trial];
    }
    heart.confidence =
        1.0 - static_cast<double>(heart.failures) / static_cast<double>(opts.trials);
    spade.confidence =
        1.0 - static_cast<double>(spade.failures) / static_cast<double>(opts.trials);
    heart.extra_name = spade.extra_name = "confidence_099n";
    heart.extra = 1.0 - static_cast<double>(h99) / static_cast<double>(opts.trials);
    spade.extra = 1.0 - static_cast<double>(s99) / static_cast<double>(opts.trials);
    return {heart, spade};
}

bool suitable_verdict(std::span<const PropertyReport> reports, double delta) {
    bool club = false, diamond = false, heart = false, spade = false;
    const double target = 1.0 - delta / 4.0;
    for (const auto& rep : reports) {
        const bool pass = rep.confidence >= target;
        if (rep.property == "club") club = pass;
        if (rep.property == "diamond") diamond = pass;
        if (rep.property == "heart") heart = pass;
        if (rep.property == "spade") spade = pass;
    }
    return club && diamond && heart && spade;
}

// --- stable lower bound --------------------------------------------------------

StableLBParams auto_stable_lb_params(double xi, double gamma_integr, std::size_t m, double c0,
                                     double c1) {
    require(xi > 0.0 && xi < 1.0, "auto_stable_lb_params: xi in (0,1)");
    require(gamma_integr > 0.0, "auto_stable_lb_params: Gamma > 0");
    StableLBParams p;
    p.m = m;
    p.nu = 3.0 * xi;
    const double g2 = gamma_integr * gamma_integr;
    p.ell = static_cast<std::size_t>(std::floor(c0 * static_cast<double>(m) * xi / g2));
    p.ell = std::min(p.ell, m);
    p.k = c1 * static_cast<double>(m) * xi * xi / g2;
    return p;
}

double distribution_gamma(const model::Distribution& W, double xi, double p_for_bound) {
    require(xi > 0.0 && xi < 1.0, "distribution_gamma: xi in (0,1)");
    using model::Family;
    switch (W.family) {
        case Family::two_point:
        case Family::sym_two_point: {
            // finite support {0, |K|}: the infimum sits at the K level
            const double K = std::abs(W.a), q = W.b;
            require(K > 0.0 && q > 0.0, "distribution_gamma: degenerate two-point");
            return K / std::sqrt(K * K * q);  // = 1/sqrt(q)
        }
        case Family::gaussian: {
            require(W.a == 0.0, "distribution_gamma: centred gaussian only");
            // E[Z^2 1{|Z| >= z}] = 2 (z phi(z) + 1 - Phi(z)) for standard Z
            auto tail_frac = [](double z) {
                const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
                const double upper = 0.5 * std::erfc(z / std::numbers::sqrt2);
                return 2.0 * (z * phi + upper);
            };
            double lo = 0.0, hi = 40.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (tail_frac(mid) <= xi)
                    hi = mid;
                else
                    lo = mid;
            }
            return hi;
        }
        case Family::pareto: {
            // tail(t)/E X^2 = (t/s)^{2-a} for t >= s
            const double a = W.a, s = W.b;
            const double t = s * std::pow(xi, -1.0 / (a - 2.0));
            return t / std::sqrt(W.second_moment());
        }
        case Family::student_t:
            // no closed-form tail second moment; the L_p moment bound is a valid
            // integrability constant for any admissible p
            return std::pow(W.lp_norm(p_for_bound) / std::sqrt(W.second_moment()),
                            p_for_bound / (p_for_bound - 2.0)) *
                   std::pow(1.0 / xi, 1.0 / (p_for_bound - 2.0));
    }
    throw std::runtime_error("distribution_gamma: unknown family");
}

PropertyReport check_stable_lower_bound(const model::Distribution& W, const StableLBParams& params,
                                        std::size_t trials, std::uint64_t seed,
                                        std::size_t jobs) {
    require(params.ell <= params.m, "check_stable_lower_bound: ell <= m required");
    require(trials >= 1, "check_stable_lower_bound: trials >= 1");
    const double norm2_sq = W.second_moment();
    const double threshold = (1.0 - params.nu) * norm2_sq;
    const std::size_t m = params.m;

    std::vector<std::uint8_t> fail(trials, 0);
    parallel::parallel_for(trials, jobs, [&](std::size_t trial) {
        model::DrawCtx ctx(seed, rng::stream::verify, kStableBase + trial);
        std::vector<double> sq(m);
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = W.draw(ctx, i);
            sq[i] = w * w;
            total += sq[i];
        }
        double removed = 0.0;
        if (params.ell > 0) {
            // adversarial J: the ell largest squares
            std::nth_element(sq.begin(), sq.begin() + (params.ell - 1), sq.end(),
                             std::greater<double>());
            for (std::size_t i = 0; i < params.ell; ++i) removed += sq[i];
        }
        const double rest = (total - removed) / static_cast<double>(m);
        if (rest < threshold) fail[trial] = 1;
    });

    PropertyReport rep;
    rep.property = "stable-lb";
    rep.trials = trials;
    for (std::size_t trial = 0; trial < trials; ++trial) rep.failures += fail[trial];
    rep.confidence = 1.0 - static_cast<double>(rep.failures) / static_cast<double>(trials);
    rep.nu = params.nu;
    rep.m = params.m;
    rep.ell = params.ell;
    rep.k = params.k;
    rep.extra_name = "target_2exp_minus_k";
    rep.extra = 2.0 * std::exp(-params.k);
    return rep;
}

// --- MoM small-ball ---------------------------------------------------------------

SmallBallReport check_mom_small_ball(const model::Distribution& W, std::size_t m,
                                     std::span<const double> eta_grid, std::size_t trials_per_eta,
                                     std::uint64_t seed, double c2, std::size_t jobs) {
    require(!eta_grid.empty(), "check_mom_small_ball: nonempty eta grid");
    for (double eta : eta_grid)
        require(eta > 0.0 && eta < 1.0, "check_mom_small_ball: eta grid must lie in (0,1)");
    const double norm2 = std::sqrt(W.second_moment());
    require(norm2 > 0.0, "check_mom_small_ball: ||W||_2 > 0 required");

    double eta0 = eta_grid[0];
    for (double eta : eta_grid) eta0 = std::min(eta0, eta);
    const double gamma = distribution_gamma(W, 0.01, 6.0);
    require(static_cast<double>(m) * eta0 * eta0 >=
                c2 * std::max(1.0, gamma * gamma) * (1.0 - 1e-9),
            "check_mom_small_ball: precondition m eta_0^2 >= c2 max{1, Gamma^2} violated (m = " +
                std::to_string(m) + ", Gamma = " + report::fmt(gamma) + ")");

    // |S| samples per eta (fresh trials per grid point).
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<std::vector<double>> abs_s(eta_grid.size());
    for (std::size_t e = 0; e < eta_grid.size(); ++e) {
        abs_s[e].resize(trials_per_eta);
        parallel::parallel_for(trials_per_eta, jobs, [&, e](std::size_t trial) {
            const std::uint64_t sub = kSmallBallBase + (std::uint64_t{e} << 24) + trial;
            model::DrawCtx ctx(seed, rng::stream::verify, sub);
            rng::CounterRng signs(seed, rng::stream::signs, sub);
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double w = W.draw(ctx, i);
                acc += (signs.u01(i) < 0.5 ? -w : w);
            }
            abs_s[e][trial] = std::abs(acc) * inv_sqrt_m;
        });
        std::sort(abs_s[e].begin(), abs_s[e].end());
    }

    auto prob_at = [&](std::size_t e, double thr) {
        const auto& v = abs_s[e];
        const std::size_t cnt = std::upper_bound(v.begin(), v.end(), thr) - v.begin();
        return static_cast<double>(cnt) / static_cast<double>(trials_per_eta);
    };
    auto holds = [&](double c3) {
        for (std::size_t e = 0; e < eta_grid.size(); ++e) {
            const double p = prob_at(e, c3 * eta_grid[e] * norm2);
            const double se = std::sqrt(
                std::max(p * (1.0 - p), 1.0 / static_cast<double>(trials_per_eta)) /
                static_cast<double>(trials_per_eta));
            if (p + 3.0 * se > eta_grid[e]) return false;
        }
        return true;
    };

    // largest grid c3 for which the inequality holds across the whole grid
    double c3 = 0.0;
    for (int ci = 40; ci >= 1; --ci) {
        const double cand = 0.05 * ci;  // 2.00 down to 0.05
        if (holds(cand)) {
            c3 = cand;
            break;
        }
    }

    SmallBallReport out;
    out.c3 = c3;
    out.base.property = "small-ball";
    out.base.trials = trials_per_eta;
    out.base.m = m;
    out.base.extra_name = "c3";
    out.base.extra = c3;
    const double report_c3 = c3 > 0.0 ? c3 : 0.05;
    for (std::size_t e = 0; e < eta_grid.size(); ++e) {
        SmallBallRow row;
        row.eta = eta_grid[e];
        row.prob = prob_at(e, report_c3 * eta_grid[e] * norm2);
        row.stderr_ = std::sqrt(
            std::max(row.prob * (1.0 - row.prob), 1.0 / static_cast<double>(trials_per_eta)) /
            static_cast<double>(trials_per_eta));
        if (c3 == 0.0 || row.prob + 3.0 * row.stderr_ > row.eta) ++out.base.failures;
        out.rows.push_back(row);
    }
    out.base.confidence = out.base.failures == 0 ? 1.0 : 0.0;
    return out;
}

// --- multiplier norm bound ----------------------------------------------------------

namespace {

std::vector<std::pair<double, double>> finite_support(const model::Distribution& d) {
    using model::Family;
    switch (d.family) {
        case Family::two_point:
            return {{d.a, d.b}, {0.0, 1.0 - d.b}};
        case Family::sym_two_point:
            return {{-d.a, d.b / 2.0}, {d.a, d.b / 2.0}, {0.0, 1.0 - d.b}};
        default:
            throw std::runtime_error(
                "check_multiplier_norm: product-space construction requires finite-support "
                "factors (two_point / sym_two_point)");
    }
}

}  // namespace

MultiplierNormReport check_multiplier_norm(const model::Distribution& xi,
                                           const model::Distribution& h, double p, double M,
                                           std::optional<double> c) {
    require(p > 4.0, "check_multiplier_norm: p > 4 required");
    require(M > 0.0, "check_multiplier_norm: M > 0 required");
    const double xi_p = xi.lp_norm(p);
    const double h_p = h.lp_norm(p);
    require(xi_p <= M * (1.0 + 1e-12), "check_multiplier_norm: ||xi||_p = " + report::fmt(xi_p) +
                                           " exceeds M = " + report::fmt(M));
    require(h_p <= M * (1.0 + 1e-12), "check_multiplier_norm: ||h||_p = " + report::fmt(h_p) +
                                          " exceeds M = " + report::fmt(M));

    const auto ax = finite_support(xi);
    const auto ah = finite_support(h);
    // independent product space: exact E[xi^2 h^2]
    double ex2h2 = 0.0;
    for (const auto& [xv, xp] : ax)
        for (const auto& [hv, hp] : ah) ex2h2 += xp * hp * xv * xv * hv * hv;
    double h2 = 0.0;
    for (const auto& [hv, hp] : ah) h2 += hp * hv * hv;

    MultiplierNormReport rep;
    rep.c = c.value_or(std::pow(2.0, p / (p - 2.0)) + 1.0);
    rep.lhs = std::sqrt(ex2h2);
    rep.bound =
        rep.c * std::pow(M, p / (p - 2.0)) * std::pow(std::sqrt(h2), 1.0 - 2.0 / (p - 2.0));
    rep.ok = rep.lhs <= rep.bound * (1.0 + 1e-12);
    rep.ratio = rep.bound > 0.0 ? rep.lhs / rep.bound : 0.0;
    return rep;
}

// --- excess risk ----------------------------------------------------------------------

double excess_risk(const model::Triplet& t, std::span<const double> row) {
    const auto risk = model::exact_risk_row(t, row);
    require(risk.has_value(), "excess_risk: exact risk unavailable on this backend");
    const auto base = model::exact_risk_row(t, t.cls().row(t.fstar()));
    return *risk - *base;
}

double excess_risk(const model::Triplet& t, std::size_t member) {
    return excess_risk(t, t.cls().row(member));
}

McRisk excess_risk_mc(const model::Triplet& t, std::span<const double> row, std::size_t samples,
                      std::uint64_t seed) {
    require(samples >= 2, "excess_risk_mc: samples >= 2");
    const auto s = sampler::draw_sample(t, samples, seed, rng::stream::oracle);
    std::vector<double> vals(samples), base(samples);
    sampler::evaluate_row(t.cls(), row, s, vals.data());
    sampler::evaluate_member(t.cls(), t.fstar(), s, base.data());
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double a = vals[i] - s.y[i];
        const double b = base[i] - s.y[i];
        const double d = a * a - b * b;
        acc += d;
        acc2 += d * d;
    }
    const double n = static_cast<double>(samples);
    McRisk out;
    out.samples = samples;
    out.value = acc / n;
    const double var = std::max(0.0, (acc2 / n - out.value * out.value) * n / (n - 1.0));
    out.stderr_ = std::sqrt(var / n);
    return out;
}

void save_property_csv(const std::string& path, std::span<const PropertyReport> reports,
                       std::uint64_t config_hash, std::uint64_t seed) {
    report::CsvWriter w(path, report::standard_header("verify", config_hash, seed),
                        {"property", "trials", "failures", "confidence", "alpha", "beta", "gamma",
                         "nu", "r", "m", "n", "ell", "k", "extra_name", "extra"});
    for (const auto& rep : reports)
        w.row({rep.property, std::to_string(rep.trials), std::to_string(rep.failures),
               report::fmt(rep.confidence), report::fmt(rep.alpha), report::fmt(rep.beta),
               report::fmt(rep.gamma), report::fmt(rep.nu), report::fmt(rep.r),
               std::to_string(rep.m), std::to_string(rep.n), std::to_string(rep.ell),
               report::fmt(rep.k), rep.extra_name.empty() ? "-" : rep.extra_name,
               report::fmt(rep.extra)});
    w.close();
}

}  // namespace lpt::verify
