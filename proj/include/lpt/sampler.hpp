// sampler.hpp — i.i.d. sample generation, Rademacher signs, block partitions.
//
// Generation is stateless: a (seed, stream, index) triple determines every
// draw, so parallel workers can reproduce any slice without shared state.
// Sample draws and sign draws live in distinct stream namespaces; changing
// one seed never perturbs the other stream.
#pragma once

#include <cstdint>
#include <vector>

#include "lpt/model.hpp"

namespace lpt::sampler {

struct Sample {
    // tabular backend: atom index per point (size N); features empty
    std::vector<std::uint32_t> atoms;
    // linear backend: row-major N x dim feature matrix; atoms empty
    std::vector<double> features;
    std::vector<double> y;
    std::size_t dim = 0;  // 0 for tabular
    std::uint64_t seed = 0;

    std::size_t size() const { return y.size(); }
    const double* point(std::size_t i) const { return features.data() + i * dim; }
};

struct SignVector {
    std::vector<double> signs;  // +-1.0
    std::uint64_t seed = 0;
    std::size_t size() const { return signs.size(); }
};

// Disjoint contiguous blocks I_j = [j*m, (j+1)*m), j = 0..n-1, covering the
// first n*m points; the trailing N - n*m points are discarded and reported.
struct BlockPartition {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t discarded = 0;

    std::size_t begin(std::size_t j) const { return j * m; }
    std::size_t end(std::size_t j) const { return (j + 1) * m; }
    std::size_t covered() const { return n * m; }
};

Sample draw_sample(const model::Triplet& t, std::size_t N, std::uint64_t seed,
                   std::uint64_t substream = 0);
SignVector draw_signs(std::size_t N, std::uint64_t seed, std::uint64_t substream = 0);
BlockPartition partition(std::size_t N, std::size_t m);

// Member-major evaluation matrix: row(g)[i] = f_g(X_i). The block statistics
// kernels run over contiguous slices of these rows.
struct EvalMatrix {
    std::size_t members = 0;
    std::size_t n = 0;
    std::vector<double> v;
    const double* row(std::size_t g) const { return v.data() + g * n; }
    double* row(std::size_t g) { return v.data() + g * n; }
};

EvalMatrix evaluate(const model::HypothesisClass& cls, const Sample& s);
// Single member evaluation into a caller buffer (used for midpoints etc.).
void evaluate_member(const model::HypothesisClass& cls, std::size_t member, const Sample& s,
                     double* out);
// Evaluate an arbitrary representation row (atom values / weights).
void evaluate_row(const model::HypothesisClass& cls, std::span<const double> row, const Sample& s,
                  double* out);

// Sample CSV export: x columns then y; seeds recorded in the header.
void save_sample_csv(const std::string& path, const Sample& s, std::uint64_t config_hash);

}  // namespace lpt::sampler
