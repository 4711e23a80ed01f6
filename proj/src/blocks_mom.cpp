#include "lpt/blocks_mom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpt/kernels.hpp"
#include "lpt/report.hpp"

namespace lpt::blocks_mom {

double lower_median(std::vector<double> values) {
    if (values.empty()) throw std::runtime_error("lower_median: empty list");
    const std::size_t k = (values.size() + 1) / 2 - 1;  // ceil(n/2), 0-based
    std::nth_element(values.begin(), values.begin() + k, values.end());
    return values[k];
}

double mu_j(std::span<const double> f_vals, std::span<const double> h_vals,
            const sampler::SignVector& signs, const sampler::BlockPartition& part,
            std::size_t j) {
    if (j >= part.n) throw std::runtime_error("mu_j: block index out of range");
    if (part.covered() > f_vals.size() || part.covered() > signs.size())
        throw std::runtime_error("mu_j: block range exceeds sample");
    const std::size_t b = part.begin(j);
    const double s = kernels::dot_diff(signs.signs.data() + b, f_vals.data() + b,
                                       h_vals.data() + b, part.m);
    return std::abs(s) / std::sqrt(static_cast<double>(part.m));
}

double mu_j(const model::HypothesisClass& cls, std::size_t f, std::size_t h,
            const sampler::Sample& s, const sampler::SignVector& signs,
            const sampler::BlockPartition& part, std::size_t j) {
    std::vector<double> fv(s.size()), hv(s.size());
    sampler::evaluate_member(cls, f, s, fv.data());
    sampler::evaluate_member(cls, h, s, hv.data());
    return mu_j(fv, hv, signs, part, j);
}

OracleTable p1_oracle(const sampler::EvalMatrix& ev, const sampler::SignVector& signs,
                      const sampler::BlockPartition& part, std::size_t eval_offset) {
    if (eval_offset + part.covered() > ev.n || part.covered() > signs.size())
        throw std::runtime_error("p1_oracle: sample shorter than n*m");
    const std::size_t K = ev.members;
    const std::size_t n = part.n, m = part.m;
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

    // Signed block sums per member: S[g][j] = sum_{i in I_j} eps_i f_g(X_i).
    std::vector<double> S(K * n);
    for (std::size_t g = 0; g < K; ++g) {
        const double* row = ev.row(g) + eval_offset;
        for (std::size_t j = 0; j < n; ++j)
            S[g * n + j] = kernels::dot(signs.signs.data() + part.begin(j), row + part.begin(j), m);
    }

    OracleTable table;
    table.members = K;
    table.m = m;
    table.n = n;
    table.psi.assign(K * K, 0.0);
    std::vector<double> mu(n);
    for (std::size_t f = 0; f < K; ++f) {
        for (std::size_t h = f + 1; h < K; ++h) {
            for (std::size_t j = 0; j < n; ++j)
                mu[j] = std::abs(S[f * n + j] - S[h * n + j]) * inv_sqrt_m;
            const double psi = lower_median(mu);
            table.at(f, h) = psi;
            table.at(h, f) = psi;
        }
    }
    return table;
}

double psi_norm_oracle(std::span<const double> h_vals, const sampler::SignVector& signs,
                       const sampler::BlockPartition& part) {
    if (part.covered() > h_vals.size() || part.covered() > signs.size())
        throw std::runtime_error("psi_norm_oracle: sample shorter than n*m");
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(part.m));
    std::vector<double> mu(part.n);
    for (std::size_t j = 0; j < part.n; ++j) {
        const double s = kernels::dot(signs.signs.data() + part.begin(j),
                                      h_vals.data() + part.begin(j), part.m);
        mu[j] = std::abs(s) * inv_sqrt_m;
    }
    return lower_median(std::move(mu));
}

void save_oracle_csv(const std::string& path, const OracleTable& table,
                     const std::vector<std::string>& labels, std::uint64_t config_hash,
                     std::uint64_t seed) {
    report::CsvWriter w(
        path,
        report::standard_header("p1-oracle", config_hash, seed,
                                {"m = " + std::to_string(table.m),
                                 "n = " + std::to_string(table.n)}),
        {"f_id", "h_id", "psi"});
    for (std::size_t f = 0; f < table.members; ++f)
        for (std::size_t h = f; h < table.members; ++h)
            w.row({labels[f], labels[h], report::fmt(table.at(f, h))});
    w.close();
}

}  // namespace lpt::blocks_mom
