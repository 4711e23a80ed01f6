// norms.hpp — L_q norms, integrability constants, small-ball probabilities.
//
// Exact on the tabular backend (finite sums over atoms); Monte Carlo with
// reported standard errors on generative sources. The integrability constant
//   Gamma(f, xi) = inf{ G : E f^2 1{|f| >= G ||f||_2} <= xi E f^2 }
// is computed exactly by scanning the sorted |f| levels; the infimum may be
// approached rather than attained, so callers certify it two-sidedly.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpt/model.hpp"

namespace lpt::norms {

// --- L_q norms -------------------------------------------------------------

// Exact (sum over atoms): (sum_a p_a |v_a|^q)^{1/q}. q >= 1, finite.
double lq_norm(std::span<const double> values, std::span<const double> probs, double q);
double lq_norm(const model::FunctionTable& f, double q);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

// Monte Carlo L_q norm for a generative source. Estimates at doubling sample
// sizes; a monotone, factor-2 blow-up across the doublings raises an error
// (diverging moment).
McEstimate lq_norm_mc(const model::GenerativeSource& src, double q, std::size_t base_samples,
                      std::uint64_t seed);

// --- integrability constant -------------------------------------------------

struct IntegrabilityReport {
    double gamma = 0.0;
    double xi = 0.0;
    bool exact = true;                 // exact level-scan vs Monte Carlo
    double lp_moment_bound = 0.0;     // L_p moment bound: (||W||_p / ||W||_2)^{p/(p-2)} (1/xi)^{1/(p-2)}
    double ci_lo = 0.0, ci_hi = 0.0;   // 95% CI (Monte Carlo mode only)
};

// Exact mode; p_for_bound > 2 is used only for the reported L_p bound.
IntegrabilityReport integrability_constant(std::span<const double> values,
                                           std::span<const double> probs, double xi,
                                           double p_for_bound);
IntegrabilityReport integrability_constant(const model::FunctionTable& f, double xi,
                                           double p_for_bound);

// Monte Carlo mode (plug-in level scan on batches, 95% CI over batches).
IntegrabilityReport integrability_constant_mc(const model::GenerativeSource& src, double xi,
                                              std::size_t samples_per_batch, std::size_t batches,
                                              std::uint64_t seed);

// E f^2 1{|f| >= gamma ||f||_2}, exact; used to certify the infimum.
double tail_second_moment(std::span<const double> values, std::span<const double> probs,
                          double gamma);

// --- small-ball --------------------------------------------------------------

// Pr(|f| >= kappa ||f||_2), exact on atoms. Requires ||f||_2 > 0.
double small_ball_probability(std::span<const double> values, std::span<const double> probs,
                              double kappa);
double small_ball_probability(const model::FunctionTable& f, double kappa);

struct ProbEstimate {
    double value = 0.0;
    double stderr_ = 0.0;  // 0 when closed-form
    bool exact = false;
};

// Generative: closed form where the family admits one, Monte Carlo otherwise.
ProbEstimate small_ball_probability(const model::GenerativeSource& src, double kappa,
                                    std::size_t samples, std::uint64_t seed);

// Report rows (member-id, q, norm, stderr); exact norms on tabular classes
// (stderr 0), Minkowski upper bounds flagged as such for linear ones.
void save_norms_csv(const std::string& path, const model::HypothesisClass& cls,
                    std::span<const double> qs, std::uint64_t config_hash, std::uint64_t seed);

}  // namespace lpt::norms
