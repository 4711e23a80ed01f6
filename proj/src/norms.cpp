#include "lpt/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpt/report.hpp"
#include "lpt/rng.hpp"

namespace lpt::norms {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

double lp_moment_bound_of(double norm_p, double norm_2, double xi, double p) {
    return std::pow(norm_p / norm_2, p / (p - 2.0)) * std::pow(1.0 / xi, 1.0 / (p - 2.0));
}

// Exact level scan shared by the tabular and plug-in Monte Carlo paths.
// levels/weights: |value| and probability of every positive-probability atom.
double gamma_from_levels(std::vector<std::pair<double, double>> lv, double xi) {
    double ef2 = 0.0;
    for (auto& [v, w] : lv) ef2 += w * v * v;
    require(ef2 > 0.0, "integrability_constant: ||f||_2 = 0, Gamma undefined");
    const double r2 = std::sqrt(ef2);

    std::sort(lv.begin(), lv.end());  // ascending |value|
    // tail(j) = E f^2 1{|f| >= level_j}; scan ascending and return the left
    // endpoint of the first interval on which the defining inequality holds.
    const double target = xi * ef2;
    double tail = ef2;
    double gamma = 0.0;
    std::size_t i = 0;
    while (i < lv.size()) {
        // drop the whole level group at lv[i]
        const double level = lv[i].first;
        double group = 0.0;
        while (i < lv.size() && lv[i].first == level) {
            group += lv[i].second * lv[i].first * lv[i].first;
            ++i;
        }
        const double next_tail = tail - group;
        if (next_tail <= target) return level / r2;  // infimum at this level
        tail = next_tail;
        gamma = level / r2;
    }
    return gamma;  // unreachable for xi < 1 with ef2 > 0
}

}  // namespace

double lq_norm(std::span<const double> values, std::span<const double> probs, double q) {
    require(q >= 1.0 && std::isfinite(q), "lq_norm: finite q >= 1 required");
    require(values.size() == probs.size(), "lq_norm: length mismatch");
    double acc = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
        acc += probs[a] * std::pow(std::abs(values[a]), q);
    return std::pow(acc, 1.0 / q);
}

double lq_norm(const model::FunctionTable& f, double q) {
    return lq_norm(f.values(), f.space()->probs(), q);
}

McEstimate lq_norm_mc(const model::GenerativeSource& src, double q, std::size_t base_samples,
                      std::uint64_t seed) {
    require(q >= 1.0 && std::isfinite(q), "lq_norm_mc: finite q >= 1 required");
    require(base_samples >= 16, "lq_norm_mc: base_samples >= 16");
    model::DrawCtx ctx(seed, rng::stream::oracle, 0x71);
    const std::size_t total = base_samples * 8;
    double acc = 0.0, acc2 = 0.0, wmax = 0.0;
    double est[4] = {0, 0, 0, 0};
    std::size_t checkpoint = base_samples, k = 0;
    for (std::size_t i = 0; i < total; ++i) {
        const double w = std::pow(std::abs(src.dist().draw(ctx, i)), q);
        acc += w;
        acc2 += w * w;
        wmax = std::max(wmax, w);
        if (i + 1 == checkpoint) {
            est[k++] = std::pow(acc / static_cast<double>(i + 1), 1.0 / q);
            checkpoint *= 2;
        }
    }
    // Divergence diagnostics: with an infinite moment the estimate keeps
    // climbing across the doublings and a single draw carries a constant
    // share of the sum; with an integrable moment both effects vanish.
    const double max_share = wmax / acc;
    const bool rising = est[3] > 1.2 * est[0] && est[3] > est[1];
    if (max_share > 0.5 || (max_share > 0.2 && rising) ||
        (est[0] < est[1] && est[1] < est[2] && est[2] < est[3] && est[3] > 2.0 * est[0]))
        throw std::runtime_error("lq_norm_mc: estimate diverging across doubling sample sizes (" +
                                 report::fmt(est[0]) + " -> " + report::fmt(est[3]) +
                                 ", max-term share " + report::fmt(max_share) +
                                 "); L_q moment appears infinite");
    const double n = static_cast<double>(total);
    const double mean = acc / n;
    const double var = std::max(0.0, acc2 / n - mean * mean);
    const double se_mean = std::sqrt(var / n);
    McEstimate out;
    out.value = est[3];
    // delta method: d(m^{1/q})/dm = m^{1/q-1}/q
    out.stderr_ = se_mean * std::pow(mean, 1.0 / q - 1.0) / q;
    out.samples = total;
    return out;
}

double tail_second_moment(std::span<const double> values, std::span<const double> probs,
                          double gamma) {
    double ef2 = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a) ef2 += probs[a] * values[a] * values[a];
    const double r2 = std::sqrt(ef2);
    double tail = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
        if (std::abs(values[a]) >= gamma * r2) tail += probs[a] * values[a] * values[a];
    return tail;
}

IntegrabilityReport integrability_constant(std::span<const double> values,
                                           std::span<const double> probs, double xi,
                                           double p_for_bound) {
    require(xi > 0.0 && xi < 1.0, "integrability_constant: xi in (0,1) required");
    require(p_for_bound > 2.0, "integrability_constant: p > 2 required for the L_p moment bound");
    std::vector<std::pair<double, double>> lv;
    for (std::size_t a = 0; a < values.size(); ++a)
        if (probs[a] > 0.0 && values[a] != 0.0) lv.emplace_back(std::abs(values[a]), probs[a]);
    require(!lv.empty(), "integrability_constant: ||f||_2 = 0, Gamma undefined");

    IntegrabilityReport rep;
    rep.xi = xi;
    rep.exact = true;
    rep.gamma = gamma_from_levels(lv, xi);
    rep.lp_moment_bound = lp_moment_bound_of(lq_norm(values, probs, p_for_bound),
                                       lq_norm(values, probs, 2.0), xi, p_for_bound);
    rep.ci_lo = rep.ci_hi = rep.gamma;
    return rep;
}

IntegrabilityReport integrability_constant(const model::FunctionTable& f, double xi,
                                           double p_for_bound) {
    return integrability_constant(f.values(), f.space()->probs(), xi, p_for_bound);
}

IntegrabilityReport integrability_constant_mc(const model::GenerativeSource& src, double xi,
                                              std::size_t samples_per_batch, std::size_t batches,
                                              std::uint64_t seed) {
    require(xi > 0.0 && xi < 1.0, "integrability_constant_mc: xi in (0,1) required");
    require(batches >= 2, "integrability_constant_mc: batches >= 2");
    model::DrawCtx ctx(seed, rng::stream::oracle, 0x72);
    std::vector<double> gammas(batches);
    const double w = 1.0 / static_cast<double>(samples_per_batch);
    for (std::size_t b = 0; b < batches; ++b) {
        std::vector<std::pair<double, double>> lv;
        lv.reserve(samples_per_batch);
        for (std::size_t i = 0; i < samples_per_batch; ++i) {
            const double x = src.dist().draw(ctx, b * samples_per_batch + i);
            if (x != 0.0) lv.emplace_back(std::abs(x), w);
        }
        gammas[b] = gamma_from_levels(std::move(lv), xi);
    }
    double mean = 0.0;
    for (double g : gammas) mean += g;
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (double g : gammas) var += (g - mean) * (g - mean);
    var /= static_cast<double>(batches - 1);
    const double half = 1.96 * std::sqrt(var / static_cast<double>(batches));

    IntegrabilityReport rep;
    rep.xi = xi;
    rep.exact = false;
    rep.gamma = mean;
    rep.ci_lo = mean - half;
    rep.ci_hi = mean + half;
    rep.lp_moment_bound = lp_moment_bound_of(src.dist().lp_norm(src.p()),
                                       std::sqrt(src.dist().second_moment()), xi, src.p());
    return rep;
}

double small_ball_probability(std::span<const double> values, std::span<const double> probs,
                              double kappa) {
    double ef2 = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a) ef2 += probs[a] * values[a] * values[a];
    require(ef2 > 0.0, "small_ball_probability: ||f||_2 > 0 required");
    const double t = kappa * std::sqrt(ef2);
    double pr = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a)
        if (std::abs(values[a]) >= t) pr += probs[a];
    return pr;
}

double small_ball_probability(const model::FunctionTable& f, double kappa) {
    return small_ball_probability(f.values(), f.space()->probs(), kappa);
}

void save_norms_csv(const std::string& path, const model::HypothesisClass& cls,
                    std::span<const double> qs, std::uint64_t config_hash, std::uint64_t seed) {
    const bool tab = cls.backend() == model::HypothesisClass::Backend::tabular;
    report::CsvWriter w(path,
                        report::standard_header("norms", config_hash, seed,
                                                {std::string("mode = ") +
                                                 (tab ? "exact" : "minkowski-bound")}),
                        {"member_id", "q", "norm", "stderr"});
    for (std::size_t g = 0; g < cls.size(); ++g) {
        for (double q : qs) {
            double norm;
            if (tab) {
                norm = lq_norm(cls.row(g), cls.space()->probs(), q);
            } else {
                const double coord = cls.features().dist().lp_norm(q);
                double l1 = 0.0;
                for (double v : cls.row(g)) l1 += std::abs(v);
                norm = l1 * coord;
            }
            w.row({cls.label(g), report::fmt(q), report::fmt(norm), "0"});
        }
    }
    w.close();
}

ProbEstimate small_ball_probability(const model::GenerativeSource& src, double kappa,
                                    std::size_t samples, std::uint64_t seed) {
    const double r2 = std::sqrt(src.dist().second_moment());
    require(r2 > 0.0, "small_ball_probability: ||f||_2 > 0 required");
    ProbEstimate out;
    if (auto closed = src.dist().tail_two_sided(kappa * r2)) {
        out.value = *closed;
        out.exact = true;
        return out;
    }
    model::DrawCtx ctx(seed, rng::stream::oracle, 0x73);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i)
        if (std::abs(src.dist().draw(ctx, i)) >= kappa * r2) ++hits;
    const double n = static_cast<double>(samples);
    out.value = static_cast<double>(hits) / n;
    out.stderr_ = std::sqrt(std::max(out.value * (1.0 - out.value), 1.0 / n) / n);
    return out;
}

}  // namespace lpt::norms
