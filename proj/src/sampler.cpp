#include "lpt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpt/kernels.hpp"
#include "lpt/report.hpp"
#include "lpt/rng.hpp"

namespace lpt::sampler {

namespace {

std::uint32_t draw_atom(const model::TabularSpace& space, double u) {
    const auto& cum = space.cumulative();
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    return static_cast<std::uint32_t>(std::min<std::size_t>(it - cum.begin(), cum.size() - 1));
}

}  // namespace

Sample draw_sample(const model::Triplet& t, std::size_t N, std::uint64_t seed,
                   std::uint64_t substream) {
    if (N < 1) throw std::runtime_error("draw_sample: N >= 1 required");
    const auto& cls = t.cls();
    model::DrawCtx ctx(seed, rng::stream::sample, substream);
    Sample s;
    s.seed = seed;
    s.y.resize(N);
    if (cls.backend() == model::HypothesisClass::Backend::tabular) {
        const auto& space = *cls.space();
        s.atoms.resize(N);
        for (std::size_t i = 0; i < N; ++i)
            s.atoms[i] = draw_atom(space, ctx.u01(4 * i));
        if (t.target_is_table()) {
            const auto& yv = t.target_table().values();
            for (std::size_t i = 0; i < N; ++i) s.y[i] = yv[s.atoms[i]];
        } else {
            const auto& rule = t.target_rule();
            const auto f0 = cls.row(rule.f0_index);
            const auto& noise = rule.noise.dist();
            for (std::size_t i = 0; i < N; ++i)
                s.y[i] = f0[s.atoms[i]] + noise.draw(ctx, 2 * i + 1);
        }
        return s;
    }
    const std::size_t dim = cls.dim();
    const auto& feat = cls.features().dist();
    const auto& rule = t.target_rule();
    const auto w0 = cls.row(rule.f0_index);
    const auto& noise = rule.noise.dist();
    s.dim = dim;
    s.features.resize(N * dim);
    for (std::size_t i = 0; i < N; ++i) {
        double* x = s.features.data() + i * dim;
        const std::uint64_t base = i * (dim + 1);
        for (std::size_t c = 0; c < dim; ++c) x[c] = feat.draw(ctx, base + c);
        s.y[i] = kernels::dot(w0.data(), x, dim) + noise.draw(ctx, base + dim);
    }
    return s;
}

SignVector draw_signs(std::size_t N, std::uint64_t seed, std::uint64_t substream) {
    rng::CounterRng r(seed, rng::stream::signs, substream);
    SignVector v;
    v.seed = seed;
    v.signs.resize(N);
    for (std::size_t i = 0; i < N; ++i) v.signs[i] = r.u01(i) < 0.5 ? -1.0 : 1.0;
    return v;
}

BlockPartition partition(std::size_t N, std::size_t m) {
    if (m < 1) throw std::runtime_error("partition: block size m >= 1 required");
    if (m > N)
        throw std::runtime_error("partition: block size m = " + std::to_string(m) +
                                 " exceeds sample size N = " + std::to_string(N));
    BlockPartition p;
    p.m = m;
    p.n = N / m;
    p.discarded = N - p.n * m;
    return p;
}

EvalMatrix evaluate(const model::HypothesisClass& cls, const Sample& s) {
    EvalMatrix ev;
    ev.members = cls.size();
    ev.n = s.size();
    ev.v.resize(ev.members * ev.n);
    for (std::size_t g = 0; g < ev.members; ++g) evaluate_member(cls, g, s, ev.row(g));
    return ev;
}

void evaluate_member(const model::HypothesisClass& cls, std::size_t member, const Sample& s,
                     double* out) {
    evaluate_row(cls, cls.row(member), s, out);
}

void evaluate_row(const model::HypothesisClass& cls, std::span<const double> row, const Sample& s,
                  double* out) {
    if (cls.backend() == model::HypothesisClass::Backend::tabular) {
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = row[s.atoms[i]];
    } else {
        for (std::size_t i = 0; i < s.size(); ++i)
            out[i] = kernels::dot(row.data(), s.point(i), s.dim);
    }
}

void save_sample_csv(const std::string& path, const Sample& s, std::uint64_t config_hash) {
    std::vector<std::string> cols;
    if (s.dim == 0) {
        cols = {"x_atom", "y"};
    } else {
        for (std::size_t c = 0; c < s.dim; ++c) cols.push_back("x" + std::to_string(c));
        cols.push_back("y");
    }
    report::CsvWriter w(path, report::standard_header("sample", config_hash, s.seed), cols);
    std::vector<std::string> cells(cols.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.dim == 0) {
            cells[0] = std::to_string(s.atoms[i]);
            cells[1] = report::fmt(s.y[i]);
        } else {
            for (std::size_t c = 0; c < s.dim; ++c) cells[c] = report::fmt(s.point(i)[c]);
            cells[s.dim] = report::fmt(s.y[i]);
        }
        w.row(cells);
    }
    w.close();
}

}  // namespace lpt::sampler

// find_fstar's generative path needs sample draws, so it lives here with the
// sampling machinery; the tabular path is exact.
namespace lpt::model::detail {

std::size_t resolve_fstar(const Triplet& t) {
    const auto& cls = t.cls();
    const std::size_t K = cls.size();
    std::vector<double> risk(K);
    if (cls.backend() == HypothesisClass::Backend::tabular) {
        for (std::size_t g = 0; g < K; ++g) risk[g] = *t.exact_risk(g);
    } else {
        // Dedicated oracle sample, seed namespace separate from experiments.
        const auto& opts = t.oracle_options();
        const auto s = sampler::draw_sample(t, opts.oracle_samples, opts.oracle_seed,
                                            rng::stream::oracle);
        std::vector<double> vals(s.size());
        for (std::size_t g = 0; g < K; ++g) {
            sampler::evaluate_member(cls, g, s, vals.data());
            risk[g] = kernels::sumsq_diff(vals.data(), s.y.data(), s.size()) /
                      static_cast<double>(s.size());
        }
    }
    std::size_t best = 0;
    for (std::size_t g = 0; g < K; ++g) {
        if (!std::isfinite(risk[g]))
            throw std::runtime_error("find_fstar: non-finite risk for member '" + cls.label(g) +
                                     "'");
        if (risk[g] < risk[best]) best = g;  // ties keep the lowest index
    }
    return best;
}

}  // namespace lpt::model::detail
