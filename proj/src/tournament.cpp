#include "lpt/tournament.hpp"

#include <cmath>
#include <stdexcept>

#include "lpt/kernels.hpp"
#include "lpt/report.hpp"

namespace lpt::tournament {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

}  // namespace

double TournamentConfig::r() const { return std::sqrt(eps); }

TournamentConfig TournamentConfig::make(double p, double M, double eps, double delta,
                                        double theta1, Profile profile, double alpha, double beta,
                                        double nu, double gamma) {
    require(p > 4.0, "TournamentConfig: p > 4 required");
    require(M > 0.0, "TournamentConfig: M > 0 required");
    require(eps > 0.0, "TournamentConfig: eps > 0 required");
    require(delta > 0.0 && delta < 1.0, "TournamentConfig: delta in (0,1) required");
    require(theta1 > 0.0, "TournamentConfig: theta1 > 0 required");
    require(alpha > 0.0 && beta > 0.0, "TournamentConfig: alpha, beta > 0 required");

    TournamentConfig cfg;
    cfg.p = p;
    cfg.M = M;
    cfg.eps = eps;
    cfg.delta = delta;
    cfg.theta1 = theta1;
    cfg.profile = profile;
    cfg.alpha = alpha;
    cfg.beta = beta;
    const double ratio2 = (beta * beta) / (alpha * alpha);
    if (profile == Profile::theory) {
        // rho = 2 nu (1 + beta^2/alpha^2) pinned to 1/18, gamma = nu.
        cfg.nu = (1.0 / 18.0) / (2.0 * (1.0 + ratio2));
        cfg.gamma = cfg.nu;
    } else {
        // nu = 0 admitted for boundary-case probes of the verification suite
        require(nu >= 0.0 && nu < 1.0, "TournamentConfig: nu in [0,1) required");
        require(gamma >= 0.0, "TournamentConfig: gamma >= 0 required");
        cfg.nu = nu;
        cfg.gamma = gamma;
    }
    cfg.theta2 = ratio2 + cfg.gamma;
    cfg.theta3 = 2.0 * cfg.nu / (alpha * alpha);
    cfg.theta4 = beta;

    const double m_real = theta1 * std::pow(M * M / eps, p / (p - 2.0));
    cfg.m = static_cast<std::size_t>(std::llround(std::max(1.0, m_real)));
    require(cfg.m >= 1, "TournamentConfig: derived m >= 1 required");
    cfg.rho = 2.0 * cfg.nu * (1.0 + ratio2);
    cfg.rbar2 = 2.0 * (cfg.gamma + ratio2) * eps;
    cfg.rho_ok = cfg.rho <= 1.0 / 18.0;
    return cfg;
}

std::vector<std::string> TournamentConfig::describe() const {
    std::vector<std::string> out;
    out.push_back("p = " + report::fmt(p));
    out.push_back("M = " + report::fmt(M));
    out.push_back("eps = " + report::fmt(eps));
    out.push_back("delta = " + report::fmt(delta));
    out.push_back("profile = " + std::string(profile == Profile::theory ? "theory" : "practical"));
    out.push_back("alpha = " + report::fmt(alpha));
    out.push_back("beta = " + report::fmt(beta));
    out.push_back("nu = " + report::fmt(nu));
    out.push_back("gamma = " + report::fmt(gamma));
    out.push_back("theta1 = " + report::fmt(theta1));
    out.push_back("theta2 = " + report::fmt(theta2));
    out.push_back("theta3 = " + report::fmt(theta3));
    out.push_back("theta4 = " + report::fmt(theta4));
    out.push_back("m = " + std::to_string(m));
    out.push_back("rho = " + report::fmt(rho) + (rho_ok ? "" : "  (WARNING: rho > 1/18)"));
    out.push_back("rbar2 = " + report::fmt(rbar2));
    return out;
}

double block_loss_diff(std::span<const double> h_vals, std::span<const double> f_vals,
                       std::span<const double> y, const sampler::BlockPartition& part,
                       std::size_t j) {
    require(j < part.n, "block_loss_diff: block index out of range");
    require(part.covered() <= y.size(), "block_loss_diff: block range exceeds sample");
    const std::size_t b = part.begin(j);
    const double lh = kernels::sumsq_diff(h_vals.data() + b, y.data() + b, part.m);
    const double lf = kernels::sumsq_diff(f_vals.data() + b, y.data() + b, part.m);
    return (lh - lf) / static_cast<double>(part.m);
}

std::vector<double> block_loss_means(const sampler::EvalMatrix& ev, std::span<const double> y,
                                     const sampler::BlockPartition& part,
                                     std::size_t eval_offset) {
    require(eval_offset + part.covered() <= ev.n && part.covered() <= y.size(),
            "block_loss_means: sample shorter than n*m");
    std::vector<double> loss(ev.members * part.n);
    const double inv_m = 1.0 / static_cast<double>(part.m);
    for (std::size_t g = 0; g < ev.members; ++g) {
        const double* row = ev.row(g) + eval_offset;
        for (std::size_t j = 0; j < part.n; ++j)
            loss[g * part.n + j] =
                kernels::sumsq_diff(row + part.begin(j), y.data() + part.begin(j), part.m) * inv_m;
    }
    return loss;
}

std::size_t beat_votes(std::span<const double> loss_f, std::span<const double> loss_h,
                       double psi_hf, const TournamentConfig& cfg, std::size_t n) {
    const double r = cfg.r();
    const double threshold = (psi_hf <= cfg.theta4 * r) ? -cfg.theta2 * cfg.eps
                                                        : -cfg.theta3 * psi_hf * psi_hf;
    std::size_t votes = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (loss_h[j] - loss_f[j] >= threshold) ++votes;
    return votes;
}

bool beats(std::size_t f, std::size_t h, const blocks_mom::OracleTable& oracle,
           std::span<const double> loss_blocks, const TournamentConfig& cfg, std::size_t n) {
    const std::size_t votes =
        beat_votes(loss_blocks.subspan(f * n, n), loss_blocks.subspan(h * n, n),
                   oracle.at(h, f), cfg, n);
    return 2 * votes > n;
}

ComparisonOutcome p2_compare(const sampler::EvalMatrix& ev, std::span<const double> y,
                             const blocks_mom::OracleTable& oracle,
                             const sampler::BlockPartition& part, const TournamentConfig& cfg,
                             std::size_t eval_offset) {
    require(oracle.members == ev.members, "p2_compare: oracle/member mismatch");
    const std::size_t K = ev.members, n = part.n;
    ComparisonOutcome cmp;
    cmp.members = K;
    cmp.n = n;
    cmp.loss_blocks = block_loss_means(ev, y, part, eval_offset);
    cmp.wins.assign(K * K, 0);
    cmp.votes.assign(K * K, 0);
    for (std::size_t f = 0; f < K; ++f) {
        const std::span<const double> lf(cmp.loss_blocks.data() + f * n, n);
        for (std::size_t h = 0; h < K; ++h) {
            const std::span<const double> lh(cmp.loss_blocks.data() + h * n, n);
            const std::size_t votes = beat_votes(lf, lh, oracle.at(h, f), cfg, n);
            cmp.votes[f * K + h] = static_cast<std::uint32_t>(votes);
            cmp.wins[f * K + h] = (2 * votes > n) ? 1 : 0;
        }
    }
    return cmp;
}

std::vector<std::size_t> p2_select(const ComparisonOutcome& cmp) {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < cmp.members; ++f) {
        bool all = true;
        for (std::size_t h = 0; h < cmp.members; ++h)
            if (!cmp.win(f, h)) {
                all = false;
                break;
            }
        if (all) out.push_back(f);
    }
    return out;
}

namespace {

// One P1+P2 stage over chunks [p1_begin, p1_begin+N) and [p2_begin, p2_begin+N).
StageReport run_stage(const model::HypothesisClass& cls, const sampler::Sample& s,
                      std::size_t p1_begin, std::size_t p2_begin, std::size_t N,
                      const TournamentConfig& cfg, std::uint64_t sign_seed,
                      std::uint64_t stage_id) {
    StageReport st;
    st.p1_begin = p1_begin;
    st.p1_end = p1_begin + N;
    st.p2_begin = p2_begin;
    st.p2_end = p2_begin + N;
    st.m = cfg.m;
    st.labels = cls.labels();

    const auto part = sampler::partition(N, cfg.m);
    require(part.n >= 1, "run_procedure: N < m leaves no blocks");
    st.n = part.n;

    const auto ev = sampler::evaluate(cls, s);
    const auto signs = sampler::draw_signs(N, sign_seed, stage_id);
    st.psi = blocks_mom::p1_oracle(ev, signs, part, p1_begin);
    st.psi.sample_seed = s.seed;
    st.psi.sign_seed = sign_seed;

    const std::span<const double> y(s.y.data() + p2_begin, N);
    st.comparison = p2_compare(ev, y, st.psi, part, cfg, p2_begin);
    st.survivors = p2_select(st.comparison);
    return st;
}

}  // namespace

ProcedureResult run_procedure(const model::Triplet& t, std::size_t N,
                              const TournamentConfig& cfg, std::uint64_t sample_seed,
                              std::uint64_t sign_seed, std::uint64_t substream) {
    require(N >= cfg.m, "run_procedure: per-stage sample N must be >= m");
    const auto& F = t.cls();
    ProcedureResult res;

    // Four disjoint chunks of N: P1 on F, P2 on F, P1 on bar F1, P2 on bar F1.
    const auto s = sampler::draw_sample(t, 4 * N, sample_seed, substream);

    res.stage1 = run_stage(F, s, 0, N, N, cfg, sign_seed, 2 * substream + 0);
    if (res.stage1.survivors.empty()) {
        res.failure = "P2 returned an empty set at stage 1 (F)";
        return res;
    }

    const auto fbar1 = model::midpoint_closure(F, res.stage1.survivors);
    res.stage2 = run_stage(fbar1, s, 2 * N, 3 * N, N, cfg, sign_seed, 2 * substream + 1);
    res.stage2_class = fbar1;
    if (res.stage2.survivors.empty()) {
        res.failure = "P2 returned an empty set at stage 2 (bar F1)";
        return res;
    }

    res.ok = true;
    res.fhat_index = res.stage2.survivors.front();  // first in stable id order
    const auto row = fbar1.row(res.fhat_index);
    res.fhat_row.assign(row.begin(), row.end());
    return res;
}

std::size_t erm_baseline(const model::Triplet& t, const sampler::Sample& s) {
    require(s.size() >= 1, "erm_baseline: nonempty sample required");
    const auto& cls = t.cls();
    const auto ev = sampler::evaluate(cls, s);
    std::size_t best = 0;
    double best_risk = 0.0;
    for (std::size_t g = 0; g < cls.size(); ++g) {
        const double risk =
            kernels::sumsq_diff(ev.row(g), s.y.data(), s.size()) / static_cast<double>(s.size());
        if (g == 0 || risk < best_risk) {
            best = g;
            best_risk = risk;
        }
    }
    return best;
}

void save_audit_csv(const std::string& path, const ProcedureResult& res,
                    const TournamentConfig& cfg, std::uint64_t config_hash, std::uint64_t seed) {
    auto extras = cfg.describe();
    extras.push_back("stage1_chunks = [" + std::to_string(res.stage1.p1_begin) + "," +
                     std::to_string(res.stage1.p1_end) + ") [" +
                     std::to_string(res.stage1.p2_begin) + "," +
                     std::to_string(res.stage1.p2_end) + ")");
    extras.push_back("stage2_chunks = [" + std::to_string(res.stage2.p1_begin) + "," +
                     std::to_string(res.stage2.p1_end) + ") [" +
                     std::to_string(res.stage2.p2_begin) + "," +
                     std::to_string(res.stage2.p2_end) + ")");
    extras.push_back("F1_size = " + std::to_string(res.stage1.survivors.size()));
    extras.push_back("Fbar1_size = " + std::to_string(res.stage2.labels.size()));
    extras.push_back("F2_size = " + std::to_string(res.stage2.survivors.size()));
    extras.push_back("status = " + std::string(res.ok ? "ok" : res.failure));
    if (res.ok) extras.push_back("fhat = " + res.stage2.labels[res.fhat_index]);

    report::CsvWriter w(path, report::standard_header("audit", config_hash, seed, extras),
                        {"stage", "f_id", "h_id", "psi", "votes", "wins"});
    for (int stage = 1; stage <= 2; ++stage) {
        const StageReport& st = stage == 1 ? res.stage1 : res.stage2;
        const std::size_t K = st.labels.size();
        if (st.comparison.members != K) continue;  // stage did not run
        for (std::size_t f = 0; f < K; ++f)
            for (std::size_t h = 0; h < K; ++h)
                w.row({std::to_string(stage), st.labels[f], st.labels[h],
                       report::fmt(st.psi.at(f, h)),
                       std::to_string(st.comparison.votes[f * K + h]),
                       std::to_string(static_cast<int>(st.comparison.win(f, h)))});
    }
    w.close();
}

}  // namespace lpt::tournament
