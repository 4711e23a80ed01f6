// tournament.hpp — the comparison procedure P2, the "beats" relation, and the
// full two-stage learning procedure.
//
// f beats h if, for strictly more than n/2 of the blocks,
//   B_{h,f}(j) >= -theta2 r^2        when Psi(h,f) <= theta4 r,
//   B_{h,f}(j) >= -theta3 Psi^2(h,f) when Psi(h,f) >  theta4 r,
// with r^2 = eps and B_{h,f}(j) the per-block squared-loss difference.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpt/blocks_mom.hpp"
#include "lpt/model.hpp"
#include "lpt/sampler.hpp"

namespace lpt::tournament {

struct TournamentConfig {
    enum class Profile { practical, theory };

    double p = 6.0;
    double M = 1.0;
    double eps = 1.0;     // accuracy; r = sqrt(eps)
    double delta = 0.1;

    // Oracle and suitability constants. The practical profile keeps the
    // defaults below; the theory profile recomputes nu (and gamma = nu) from
    // rho <= 1/18 given (alpha, beta).
    double alpha = 0.5;
    double beta = 2.0;
    double nu = 0.1;
    double gamma = 0.1;
    Profile profile = Profile::practical;

    double theta1 = 1.0;
    // Derived: theta2 = beta^2/alpha^2 + gamma, theta3 = 2 nu / alpha^2,
    // theta4 = beta, m = round(theta1 (M^2/eps)^{p/(p-2)}).
    double theta2 = 0.0, theta3 = 0.0, theta4 = 0.0;
    std::size_t m = 1;
    double rho = 0.0;    // 2 nu (1 + beta^2/alpha^2)
    double rbar2 = 0.0;  // 2 (gamma + beta^2/alpha^2) eps
    bool rho_ok = true;  // rho <= 1/18

    double r() const;
    std::size_t blocks_for(std::size_t N) const { return N / m; }

    static TournamentConfig make(double p, double M, double eps, double delta,
                                 double theta1 = 1.0, Profile profile = Profile::practical,
                                 double alpha = 0.5, double beta = 2.0, double nu = 0.1,
                                 double gamma = 0.1);
    std::vector<std::string> describe() const;
};

// B_{h,f}(j): difference of mean squared losses over block j. Antisymmetric.
double block_loss_diff(std::span<const double> h_vals, std::span<const double> f_vals,
                       std::span<const double> y, const sampler::BlockPartition& part,
                       std::size_t j);

// Per-member block loss means: loss[g*n + j] = (1/m) sum_{I_j} (f_g(X_i)-Y_i)^2.
// B_{h,f}(j) = loss[h][j] - loss[f][j]; retaining these reconstructs every
// per-block B value for the audit.
std::vector<double> block_loss_means(const sampler::EvalMatrix& ev, std::span<const double> y,
                                     const sampler::BlockPartition& part,
                                     std::size_t eval_offset = 0);

// Vote count for the ordered pair (f beats h): number of blocks passing the
// branch rule. f wins iff votes > n/2 (strict).
std::size_t beat_votes(std::span<const double> loss_f, std::span<const double> loss_h,
                       double psi_hf, const TournamentConfig& cfg, std::size_t n);

bool beats(std::size_t f, std::size_t h, const blocks_mom::OracleTable& oracle,
           std::span<const double> loss_blocks, const TournamentConfig& cfg, std::size_t n);

struct ComparisonOutcome {
    std::size_t members = 0, n = 0;
    std::vector<std::uint8_t> wins;       // ordered pairs: wins[f*K + h]
    std::vector<std::uint32_t> votes;     // passing-block counts per ordered pair
    std::vector<double> loss_blocks;      // K x n block loss means (audit)
    bool win(std::size_t f, std::size_t h) const { return wins[f * members + h] != 0; }
};

// P2(H) = { f in H : f beats h for every h in H }. Possible empty result is
// returned as-is; callers surface it.
ComparisonOutcome p2_compare(const sampler::EvalMatrix& ev, std::span<const double> y,
                             const blocks_mom::OracleTable& oracle,
                             const sampler::BlockPartition& part, const TournamentConfig& cfg,
                             std::size_t eval_offset = 0);
std::vector<std::size_t> p2_select(const ComparisonOutcome& cmp);

struct StageReport {
    std::size_t p1_begin = 0, p1_end = 0;  // chunk index ranges
    std::size_t p2_begin = 0, p2_end = 0;
    std::size_t n = 0, m = 0;
    std::vector<std::string> labels;       // stage class members
    blocks_mom::OracleTable psi;
    ComparisonOutcome comparison;
    std::vector<std::size_t> survivors;
};

struct ProcedureResult {
    bool ok = false;
    std::string failure;                     // names the failing stage when !ok
    std::size_t fhat_index = 0;              // index into stage2_class
    std::optional<model::HypothesisClass> stage2_class;  // bar F_1 = (F_1+F_1)/2
    std::vector<double> fhat_row;            // representation of f-hat
    StageReport stage1, stage2;
};

// The framed four-step procedure: chunks 1-2 run P1/P2 on F, chunks 3-4 on
// bar F_1; f-hat is the first element of F_2 in stable id order. Total sample
// 4N is drawn from `sample_seed`; signs use `sign_seed` (separate namespace).
// `substream` separates repeated trials under one seed.
ProcedureResult run_procedure(const model::Triplet& t, std::size_t N,
                              const TournamentConfig& cfg, std::uint64_t sample_seed,
                              std::uint64_t sign_seed, std::uint64_t substream = 0);

// Empirical risk minimizer over the class; ties by lowest id.
std::size_t erm_baseline(const model::Triplet& t, const sampler::Sample& s);

void save_audit_csv(const std::string& path, const ProcedureResult& res,
                    const TournamentConfig& cfg, std::uint64_t config_hash, std::uint64_t seed);

}  // namespace lpt::tournament
