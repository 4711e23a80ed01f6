// verify.hpp — empirical verification of the suitability properties
// (club)(diamond)(heart)(spade), the stable lower bound, the MoM small-ball
// estimate, the multiplier norm bound, and excess-risk evaluation.
//
// All checks are pure given (triplet, cfg, seed) and reproducible; trials
// parallelize over per-trial substreams.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpt/model.hpp"
#include "lpt/tournament.hpp"

namespace lpt::verify {

struct PropertyReport {
    std::string property;  // club|diamond|heart|spade|stable-lb|small-ball|multiplier-norm
    std::size_t trials = 0;
    std::size_t failures = 0;
    double confidence = 1.0;  // 1 - failures/trials
    // parameters used
    double alpha = 0.0, beta = 0.0, gamma = 0.0, nu = 0.0, r = 0.0;
    std::size_t m = 0, n = 0, ell = 0;
    double k = 0.0;
    // property-specific extra (e.g. the 0.99n-version confidence, or c3)
    std::string extra_name;
    double extra = 0.0;
};

struct VerifyOptions {
    std::size_t n_blocks = 64;  // blocks per trial sample; N = n_blocks * m
    std::size_t trials = 500;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

// (club): per trial, build P1(h, h*) for every member and test
//   Psi >= beta r  =>  beta^{-1} Psi <= ||h-h*|| <= alpha^{-1} Psi
//   Psi <  beta r  =>  ||h-h*|| <= (beta/alpha) r.
// Ground truth distances are exact, so the triplet must be tabular.
PropertyReport check_club(const model::Triplet& t, const tournament::TournamentConfig& cfg,
                          const VerifyOptions& opts);

// Grid search for the tightest (smallest beta, then largest alpha) constants
// under which check_club reaches confidence >= 1 - delta/4. Returns
// (alpha, beta); throws with the best-found report when no grid point passes.
std::pair<double, double> calibrate_alpha_beta(const model::Triplet& t,
                                               const tournament::TournamentConfig& cfg,
                                               const VerifyOptions& opts);

// (diamond): Q_{h,h*}(j) >= (1-nu) ||h-h*||^2 on more than n/2 blocks for all
// h with ||h-h*|| >= r; the >= 0.99n count is reported in `extra`.
PropertyReport check_diamond(const model::Triplet& t, const tournament::TournamentConfig& cfg,
                             const VerifyOptions& opts);

// (heart): M_{h,h*}(j) - E M >= -nu ||h-h*||^2 (majority) for ||h-h*|| >= r.
// (spade): |M_{h,h*}(j) - E M| <= gamma r^2 (majority) for ||h-h*|| <= (beta/alpha) r.
// Exact E M from atoms; tabular backend required.
std::pair<PropertyReport, PropertyReport> check_heart_spade(
    const model::Triplet& t, const tournament::TournamentConfig& cfg, const VerifyOptions& opts);

// Def. 2.5: suitable iff all four confidences >= 1 - delta/4.
bool suitable_verdict(std::span<const PropertyReport> reports, double delta);

// --- stable lower bound -----------------------------------------------------

struct StableLBParams {
    double nu = 0.0;
    std::size_t ell = 0;  // max removed count, <= m
    double k = 0.0;       // failure-probability exponent: target 2 exp(-k)
    std::size_t m = 0;
};

// Integrability-based recipe: nu = 3 xi, ell = c0 m xi / Gamma^2,
// k = c1 m xi^2 / Gamma^2.
StableLBParams auto_stable_lb_params(double xi, double gamma_integr, std::size_t m,
                                     double c0 = 1.0, double c1 = 1.0);

// Exact integrability constant of a finite-support scalar distribution
// (level scan); L_p moment-bound fallback for continuous families.
double distribution_gamma(const model::Distribution& W, double xi, double p_for_bound);

// Adversarial-J check: removing the ell largest squares minimizes the
// remaining sum over all |J| <= ell, so only that J needs testing.
PropertyReport check_stable_lower_bound(const model::Distribution& W, const StableLBParams& params,
                                        std::size_t trials, std::uint64_t seed,
                                        std::size_t jobs = 1);

// --- MoM small-ball -----------------------------------------------------------

struct SmallBallRow {
    double eta = 0.0;
    double prob = 0.0;     // empirical Pr(|m^{-1/2} sum eps_i W_i| <= c3 eta ||W||_2)
    double stderr_ = 0.0;
};

struct SmallBallReport {
    PropertyReport base;
    double c3 = 0.0;  // largest grid c3 with prob + 3 se <= eta across the grid
    std::vector<SmallBallRow> rows;  // at the chosen c3
};

SmallBallReport check_mom_small_ball(const model::Distribution& W, std::size_t m,
                                     std::span<const double> eta_grid, std::size_t trials_per_eta,
                                     std::uint64_t seed, double c2 = 1.0, std::size_t jobs = 1);

// --- multiplier norm bound ------------------------------------------------------

struct MultiplierNormReport {
    bool ok = false;
    double lhs = 0.0;    // ||xi h||_{L_2}, exact product-space enumeration
    double bound = 0.0;  // c M^{p/(p-2)} ||h||_2^{1-2/(p-2)}
    double ratio = 0.0;
    double c = 0.0;
};

// Independent xi, h with finite support (two-point families); exact.
// Default c = 2^{p/(p-2)} + 1 (recorded).
MultiplierNormReport check_multiplier_norm(const model::Distribution& xi,
                                           const model::Distribution& h, double p, double M,
                                           std::optional<double> c = std::nullopt);

// --- excess risk ------------------------------------------------------------------

// E L_f = E(f(X)-Y)^2 - E(f*(X)-Y)^2 for an arbitrary representation row
// (values on atoms / weights), exact on both backends.
double excess_risk(const model::Triplet& t, std::span<const double> row);
double excess_risk(const model::Triplet& t, std::size_t member);

struct McRisk {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

// Oracle-sample Monte Carlo estimate (generative path).
McRisk excess_risk_mc(const model::Triplet& t, std::span<const double> row, std::size_t samples,
                      std::uint64_t seed);

void save_property_csv(const std::string& path, std::span<const PropertyReport> reports,
                       std::uint64_t config_hash, std::uint64_t seed);

}  // namespace lpt::verify
