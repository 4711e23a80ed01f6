// blocks_mom.hpp — the distance oracle P1.
//
// mu_j(f,h) = | m^{-1/2} sum_{i in I_j} eps_i (f-h)(X_i) |
// Psi(f,h)  = lower median of (mu_1,...,mu_n)
//
// The oracle table is computed once per stage from that stage's first chunk
// and reused for every pairwise comparison in P2.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lpt/model.hpp"
#include "lpt/sampler.hpp"

namespace lpt::blocks_mom {

// Lower median: the ceil(k/2)-th smallest of k values. Deterministic; the
// theory only uses "more than n/2 of the blocks", so any fixed convention is
// admissible. Throws on an empty list.
double lower_median(std::vector<double> values);

// Direct evaluation of mu_j on evaluation rows (f and h values per point).
double mu_j(std::span<const double> f_vals, std::span<const double> h_vals,
            const sampler::SignVector& signs, const sampler::BlockPartition& part,
            std::size_t j);

// Spec-level form: evaluates the two members on the sample first.
double mu_j(const model::HypothesisClass& cls, std::size_t f, std::size_t h,
            const sampler::Sample& s, const sampler::SignVector& signs,
            const sampler::BlockPartition& part, std::size_t j);

struct OracleTable {
    std::size_t members = 0;
    std::vector<double> psi;  // row-major symmetric, zero diagonal
    std::size_t m = 0, n = 0;
    std::uint64_t sample_seed = 0, sign_seed = 0;

    double at(std::size_t f, std::size_t h) const { return psi[f * members + h]; }
    double& at(std::size_t f, std::size_t h) { return psi[f * members + h]; }
};

// Full pairwise table over the evaluation matrix. Member block sums are
// computed once; each pair costs O(n).
OracleTable p1_oracle(const sampler::EvalMatrix& ev, const sampler::SignVector& signs,
                      const sampler::BlockPartition& part, std::size_t eval_offset = 0);

// Psi(h, 0): the norm-oracle form (star-shaped hull around 0); identical code
// path as p1_oracle with the second member fixed to the zero function.
double psi_norm_oracle(std::span<const double> h_vals, const sampler::SignVector& signs,
                       const sampler::BlockPartition& part);

void save_oracle_csv(const std::string& path, const OracleTable& table,
                     const std::vector<std::string>& labels, std::uint64_t config_hash,
                     std::uint64_t seed);

}  // namespace lpt::blocks_mom
