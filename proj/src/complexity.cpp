#include "lpt/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpt/kernels.hpp"
#include "lpt/report.hpp"
#include "lpt/rng.hpp"
#include "lpt/sampler.hpp"

namespace lpt::complexity {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

double target_for(Kind kind, double kappa, double r) {
    return kind == Kind::quadratic ? kappa * r : kappa * r * r;
}

}  // namespace

const char* kind_name(Kind k) { return k == Kind::quadratic ? "quadratic" : "multiplier"; }

double member_distance(const model::HypothesisClass& cls, std::size_t u, std::size_t h) {
    const auto ru = cls.row(u);
    const auto rh = cls.row(h);
    if (cls.backend() == model::HypothesisClass::Backend::tabular) {
        const auto& probs = cls.space()->probs();
        double acc = 0.0;
        for (std::size_t a = 0; a < ru.size(); ++a) {
            const double d = ru[a] - rh[a];
            acc += probs[a] * d * d;
        }
        return std::sqrt(acc);
    }
    // || sum d_k X_k ||_2^2 = var(X) ||d||^2 + (E X)^2 (sum d_k)^2, i.i.d. coords
    const double mc = cls.features().dist().mean();
    const double varc = cls.features().dist().second_moment() - mc * mc;
    double norm2 = 0.0, sumd = 0.0;
    for (std::size_t k = 0; k < ru.size(); ++k) {
        const double d = ru[k] - rh[k];
        norm2 += d * d;
        sumd += d;
    }
    return std::sqrt(varc * norm2 + mc * mc * sumd * sumd);
}

StarHullQuery star_hull(const model::HypothesisClass& cls, std::size_t center, double r) {
    require(center < cls.size(), "star_hull: center out of range");
    require(r > 0.0, "star_hull: radius r > 0 required");
    StarHullQuery q;
    q.center = center;
    q.r = r;
    q.dist.resize(cls.size());
    q.lambda.resize(cls.size());
    for (std::size_t u = 0; u < cls.size(); ++u) {
        q.dist[u] = member_distance(cls, u, center);
        q.lambda[u] = q.dist[u] <= r ? 1.0 : r / q.dist[u];
    }
    return q;
}

std::vector<double> star_project(const model::HypothesisClass& cls, std::size_t u,
                                 std::size_t center, double r) {
    require(u < cls.size() && center < cls.size(), "star_project: index out of range");
    const double d = member_distance(cls, u, center);
    const auto ru = cls.row(u);
    const auto rh = cls.row(center);
    std::vector<double> out(ru.size(), 0.0);
    if (d == 0.0) return out;  // zero function
    const double lambda = d <= r ? 1.0 : r / d;
    for (std::size_t k = 0; k < ru.size(); ++k) out[k] = lambda * (ru[k] - rh[k]);
    return out;
}

OscillationEstimate estimate_oscillation(const model::Triplet& t, std::size_t center, double r,
                                         std::size_t N, std::size_t trials, Kind kind,
                                         std::uint64_t seed,
                                         const std::vector<std::size_t>* subset,
                                         std::size_t xi_member) {
    require(trials >= 2, "estimate_oscillation: trials >= 2 required");
    require(N >= 1, "estimate_oscillation: N >= 1 required");
    const auto& cls = t.cls();
    std::vector<std::size_t> members;
    if (subset) {
        members = *subset;
        require(std::find(members.begin(), members.end(), center) != members.end(),
                "estimate_oscillation: subset must contain the center");
    } else {
        members.resize(cls.size());
        for (std::size_t g = 0; g < members.size(); ++g) members[g] = g;
    }

    // xi_i = u*(X_i) - Y_i; u* is the risk minimizer of the (sub)triplet, not
    // necessarily the hull center.
    if (xi_member == SIZE_MAX) {
        if (subset) {
            xi_member = members[0];
            double best = *t.exact_risk(xi_member);
            for (std::size_t g : members) {
                const double risk = *t.exact_risk(g);
                if (risk < best) {
                    best = risk;
                    xi_member = g;
                }
            }
        } else {
            xi_member = t.fstar();
        }
    }

    std::vector<double> lambda(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
        const double d = member_distance(cls, members[k], center);
        lambda[k] = (d == 0.0) ? 0.0 : (d <= r ? 1.0 : r / d);
    }

    const double inv_n = 1.0 / static_cast<double>(N);
    std::vector<double> vals_u(N), vals_h(N), vals_xi(N), weights(N);
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto s = sampler::draw_sample(t, N, seed, rng::stream::oscillation + (trial << 8));
        const auto signs = sampler::draw_signs(N, seed, rng::stream::oscillation + (trial << 8));
        sampler::evaluate_member(cls, center, s, vals_h.data());
        if (kind == Kind::quadratic) {
            for (std::size_t i = 0; i < N; ++i) weights[i] = signs.signs[i];
        } else {
            sampler::evaluate_member(cls, xi_member, s, vals_xi.data());
            for (std::size_t i = 0; i < N; ++i)
                weights[i] = signs.signs[i] * (vals_xi[i] - s.y[i]);
        }
        double best = 0.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (lambda[k] == 0.0) continue;
            sampler::evaluate_member(cls, members[k], s, vals_u.data());
            const double v = std::abs(kernels::dot_diff(weights.data(), vals_u.data(),
                                                        vals_h.data(), N)) *
                             lambda[k] * inv_n;
            best = std::max(best, v);
        }
        acc += best;
        acc2 += best * best;
    }
    const double tn = static_cast<double>(trials);
    OscillationEstimate est;
    est.kind = kind;
    est.N = N;
    est.trials = trials;
    est.value = acc / tn;
    const double var = std::max(0.0, (acc2 / tn - est.value * est.value) * tn / (tn - 1.0));
    est.stderr_ = std::sqrt(var / tn);
    return est;
}

namespace {

// Decide "osc <= target" with 2-stderr separation, doubling trials up to the
// cap; throws when the noise cannot separate the two sides.
struct Decision {
    bool below;
    OscillationEstimate est;
};

Decision decide(const model::Triplet& t, std::size_t center, double r, std::size_t N, Kind kind,
                double target, const SearchOptions& opts,
                const std::vector<std::size_t>* subset) {
    std::size_t trials = opts.trials;
    for (;;) {
        const auto est = estimate_oscillation(t, center, r, N, trials, kind, opts.seed, subset);
        if (est.value + 2.0 * est.stderr_ <= target) return {true, est};
        if (est.value - 2.0 * est.stderr_ > target) return {false, est};
        if (trials >= opts.trials_cap)
            throw std::runtime_error(
                std::string("complexity search: Monte Carlo noise too large to separate "
                            "oscillation from target at kind=") +
                kind_name(kind) + " (estimate " + report::fmt(est.value) + " +- " +
                report::fmt(est.stderr_) + ", target " + report::fmt(target) +
                "); increase trials");
        trials = std::min(opts.trials_cap, trials * 2);
    }
}

}  // namespace

FixedPointResult fixed_point(const model::Triplet& t, std::size_t center, double kappa, Kind kind,
                             std::size_t N, const SearchOptions& opts) {
    require(kappa > 0.0, "fixed_point: kappa > 0 required");
    const auto& cls = t.cls();

    double r_hi = opts.r_hi;
    if (r_hi <= 0.0) {
        double dmax = 0.0;
        for (std::size_t u = 0; u < cls.size(); ++u)
            dmax = std::max(dmax, member_distance(cls, u, center));
        r_hi = dmax > 0.0 ? 2.0 * dmax : opts.r_lo;
    }
    double r_lo = std::min(opts.r_lo, r_hi);

    FixedPointResult res;
    res.kind = kind;
    res.kappa = kappa;
    res.N = N;

    auto probe = [&](double r) {
        Decision d = decide(t, center, r, N, kind, target_for(kind, kappa, r), opts, nullptr);
        res.trace.push_back({r, d.est.value, d.est.stderr_, d.est.trials, d.below});
        return d.below;
    };

    // Degenerate hull (all members at the center): oscillation is identically
    // zero and the infimum collapses to the bracket floor.
    if (probe(r_lo)) {
        res.r_star = res.bracket_lo = res.bracket_hi = r_lo;
        return res;
    }
    if (!probe(r_hi))
        throw std::runtime_error("fixed_point: phi(r_hi) > kappa at r_hi = " + report::fmt(r_hi) +
                                 "; increase r_hi");

    while (r_hi / r_lo > 1.0 + opts.rel_width) {
        const double mid = std::sqrt(r_lo * r_hi);
        if (probe(mid))
            r_hi = mid;
        else
            r_lo = mid;
    }
    res.bracket_lo = r_lo;
    res.bracket_hi = r_hi;
    res.r_star = r_hi;  // certified side
    return res;
}

SampleComplexityResult sample_complexity(const model::Triplet& t, double r, double kappa,
                                         Kind kind, const SearchOptions& opts,
                                         std::size_t center_override,
                                         const std::vector<std::size_t>* subset) {
    require(kappa > 0.0, "sample_complexity: kappa > 0 required");
    require(r > 0.0, "sample_complexity: r > 0 required");
    const std::size_t center = center_override == SIZE_MAX ? t.fstar() : center_override;
    const double target = target_for(kind, kappa, r);

    SampleComplexityResult res;
    res.kind = kind;
    res.kappa = kappa;
    res.r = r;

    auto probe = [&](std::size_t N) {
        Decision d = decide(t, center, r, N, kind, target, opts, subset);
        res.trace.push_back(
            {static_cast<double>(N), d.est.value, d.est.stderr_, d.est.trials, d.below});
        return d;
    };

    // Doubling phase.
    std::size_t N = 1;
    Decision d = probe(N);
    if (d.below) {
        res.N_star = 1;
        res.at_N = d.est;
        res.at_half = d.est;
        return res;
    }
    std::size_t lo = 1;  // highest known "not reached"
    for (;;) {
        const std::size_t next = std::min(opts.N_max, N * 2);
        if (next == N)
            throw std::runtime_error(
                "sample_complexity: target not reached by N_max = " + std::to_string(opts.N_max) +
                " (oscillation " + report::fmt(d.est.value) + " vs target " + report::fmt(target) +
                ")");
        N = next;
        d = probe(N);
        if (d.below) break;
        lo = N;
    }
    // Bisection on (lo, N].
    std::size_t hi = N;
    OscillationEstimate at_hi = d.est;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        Decision dm = probe(mid);
        if (dm.below) {
            hi = mid;
            at_hi = dm.est;
        } else {
            lo = mid;
        }
    }
    res.N_star = hi;
    res.at_N = at_hi;
    const std::size_t half = std::max<std::size_t>(1, hi / 2);
    res.at_half = estimate_oscillation(t, center, r, half, opts.trials, kind, opts.seed, subset);
    return res;
}

N0Report sample_size_recipe(const model::Triplet& t, double eps, double delta, double c0, double c1,
                         double c2, const SearchOptions& opts, bool unrestricted) {
    require(eps > 0.0 && delta > 0.0 && delta < 1.0, "sample_size_recipe: bad eps/delta");
    const auto& cls = t.cls();
    const double p = cls.p();
    const double M = cls.M();
    const double r = std::sqrt(eps);
    const double kappa_q = c1 * std::pow(r / M, p / (p - 2.0));

    N0Report rep;
    rep.c0 = c0;
    rep.c1 = c1;
    rep.c2 = c2;
    rep.unrestricted = unrestricted;
    rep.confidence_addend = std::pow(M * M / eps, p / (p - 2.0)) * std::log(2.0 / delta);

    if (!unrestricted) {
        rep.N_Q = sample_complexity(t, r, kappa_q, Kind::quadratic, opts).N_star;
        rep.N_M = sample_complexity(t, r, c2, Kind::multiplier, opts).N_star;
        rep.subset_sup_exact = true;
        rep.subsets_checked = 1;
    } else {
        const auto fbar = model::midpoint_closure(cls);
        const auto tbar =
            t.target_is_table()
                ? model::Triplet::make(fbar, t.target_table(), t.oracle_options())
                : model::Triplet::make(
                      fbar, model::TargetRule{t.target_rule().f0_index, t.target_rule().noise},
                      t.oracle_options());
        const std::size_t K = fbar.size();
        const std::size_t fstar_bar = tbar.fstar();
        // Subsets of bar F containing f*: exponential, enumerated for |F| <= 5
        // only; otherwise the bar-F level quantities are reported with the gap
        // flagged.
        rep.subset_sup_exact = cls.size() <= 5;
        std::size_t nq = 0, nm = 0, checked = 0;
        if (rep.subset_sup_exact) {
            std::vector<std::size_t> others;
            for (std::size_t g = 0; g < K; ++g)
                if (g != fstar_bar) others.push_back(g);
            const std::size_t limit = std::size_t{1} << others.size();
            for (std::size_t mask = 0; mask < limit; ++mask) {
                std::vector<std::size_t> sub{fstar_bar};
                for (std::size_t b = 0; b < others.size(); ++b)
                    if (mask & (std::size_t{1} << b)) sub.push_back(others[b]);
                std::sort(sub.begin(), sub.end());
                // subset risk minimizer (lowest index on ties)
                std::size_t ustar = sub[0];
                double best_risk = *tbar.exact_risk(ustar);
                for (std::size_t g : sub) {
                    const double risk = *tbar.exact_risk(g);
                    if (risk < best_risk) {
                        best_risk = risk;
                        ustar = g;
                    }
                }
                nq = std::max(nq, sample_complexity(tbar, r, kappa_q, Kind::quadratic, opts,
                                                    ustar, &sub)
                                      .N_star);
                nm = std::max(
                    nm, sample_complexity(tbar, r, c2, Kind::multiplier, opts, ustar, &sub).N_star);
                ++checked;
            }
        } else {
            nq = sample_complexity(tbar, r, kappa_q, Kind::quadratic, opts).N_star;
            nm = sample_complexity(tbar, r, c2, Kind::multiplier, opts).N_star;
            checked = 1;
        }
        rep.N_Q = nq;
        rep.N_M = nm;
        rep.subsets_checked = checked;
    }
    rep.N0 = c0 * (2.0 * static_cast<double>(std::max(rep.N_Q, rep.N_M)) + rep.confidence_addend);
    return rep;
}

void save_trace_csv(const std::string& path, const std::string& what,
                    const std::vector<TracePoint>& trace, std::uint64_t config_hash,
                    std::uint64_t seed) {
    report::CsvWriter w(path, report::standard_header(what, config_hash, seed),
                        {"x", "estimate", "stderr", "trials", "below_target"});
    for (const auto& tp : trace)
        w.row({report::fmt(tp.x), report::fmt(tp.estimate), report::fmt(tp.stderr_),
               std::to_string(tp.trials), std::to_string(static_cast<int>(tp.below))});
    w.close();
}

}  // namespace lpt::complexity
