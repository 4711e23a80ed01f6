#include "lpt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "lpt/complexity.hpp"
#include "lpt/norms.hpp"
#include "lpt/parallel.hpp"
#include "lpt/report.hpp"
#include "lpt/verify.hpp"

namespace lpt::experiments {

namespace {

const std::vector<std::string> kAllowedKeys = {
    "schema", "seed", "trials", "jobs", "out", "p", "M", "eps", "delta", "theta1", "profile",
    "alpha", "beta", "nu", "gamma", "n_blocks", "c0", "c1", "c2", "c3", "oracle_samples",
    "oracle_seed", "kernels", "triplet.", "fp.", "verify.", "w.", "sb.", "mn.", "run.",
};

std::filesystem::path out_dir(const config::Config& cfg) {
    const std::string dir = cfg.get_str("out", "out");
    std::filesystem::create_directories(dir);
    return dir;
}

tournament::TournamentConfig merge_tcfg(const config::Config& cfg,
                                        const tournament::TournamentConfig& base) {
    const std::string profile_name =
        cfg.get_str("profile", base.profile == tournament::TournamentConfig::Profile::theory
                                   ? "theory"
                                   : "practical");
    const auto profile = profile_name == "theory"
                             ? tournament::TournamentConfig::Profile::theory
                             : tournament::TournamentConfig::Profile::practical;
    return tournament::TournamentConfig::make(
        cfg.get_double("p", base.p), cfg.get_double("M", base.M), cfg.get_double("eps", base.eps),
        cfg.get_double("delta", base.delta), cfg.get_double("theta1", base.theta1), profile,
        cfg.get_double("alpha", base.alpha), cfg.get_double("beta", base.beta),
        cfg.get_double("nu", base.nu), cfg.get_double("gamma", base.gamma));
}

model::GenerativeSource noise_from(const config::Config& cfg, double p, double M) {
    model::Distribution d;
    d = model::Distribution::parse(cfg.get_str("triplet.noise.family", "two_point") + " " +
                                   cfg.get_str("triplet.noise.a", "0") + " " +
                                   cfg.get_str("triplet.noise.b", "1"));
    return model::GenerativeSource::create(d, p, M);
}

std::string quantile_str(std::vector<double> v, double q) {
    if (v.empty()) return "nan";
    std::sort(v.begin(), v.end());
    const std::size_t idx =
        std::min(v.size() - 1, static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size()))));
    return report::fmt(v[idx]);
}

}  // namespace

Instance build_instance(const config::Config& cfg) {
    cfg.validate_keys(kAllowedKeys);
    const std::string kind = cfg.get_str("triplet.kind", "club_suite");
    if (kind == "club_suite") {
        auto fx = fixtures::club_suite(cfg.get_double("delta", 0.2));
        return {std::move(fx.triplet), merge_tcfg(cfg, fx.cfg),
                cfg.get_size("n_blocks", fx.n_blocks), cfg.get_double("c3", 1.0)};
    }
    if (kind == "pair") {
        auto fx = fixtures::two_member_pair(
            cfg.get_double("p", 6.0), cfg.get_double("M", 2.0), cfg.get_double("triplet.r", 0.2),
            cfg.get_double("triplet.dist_in_r", 10.0), cfg.get_double("delta", 0.2));
        return {std::move(fx.triplet), merge_tcfg(cfg, fx.cfg),
                cfg.get_size("n_blocks", fx.n_blocks), cfg.get_double("c3", 1.0)};
    }
    if (kind == "linear_student_t") {
        auto fx = fixtures::linear_student_t_suite(cfg.get_double("delta", 0.1));
        return {std::move(fx.triplet), merge_tcfg(cfg, fx.cfg),
                cfg.get_size("n_blocks", fx.n_blocks), cfg.get_double("c3", fx.c3)};
    }
    if (kind == "file") {
        auto cls = model::load_class(cfg.require_str("triplet.class_file"));
        const double p = cls.p(), M = cls.M();
        model::TargetRule rule{cfg.get_size("triplet.f0_index", 0), noise_from(cfg, p, M)};
        model::OracleOptions opts;
        opts.oracle_samples = cfg.get_size("oracle_samples", opts.oracle_samples);
        opts.oracle_seed = cfg.get_u64("oracle_seed", opts.oracle_seed);
        auto triplet = model::Triplet::make(std::move(cls), std::move(rule), opts);
        auto tcfg = tournament::TournamentConfig::make(
            p, M, cfg.get_double("eps", 1.0), cfg.get_double("delta", 0.1),
            cfg.get_double("theta1", 1.0),
            cfg.get_str("profile", "practical") == "theory"
                ? tournament::TournamentConfig::Profile::theory
                : tournament::TournamentConfig::Profile::practical,
            cfg.get_double("alpha", 0.5), cfg.get_double("beta", 2.0), cfg.get_double("nu", 0.1),
            cfg.get_double("gamma", 0.1));
        return {std::move(triplet), tcfg, cfg.get_size("n_blocks", 64), cfg.get_double("c3", 1.0)};
    }
    throw std::runtime_error("config: unknown triplet.kind '" + kind + "'");
}

int cmd_run(const config::Config& cfg) {
    const auto inst = build_instance(cfg);
    const auto dir = out_dir(cfg);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    const std::size_t trials = cfg.get_size("trials", 10);
    const std::size_t jobs = cfg.get_size("jobs", 1);
    const std::size_t N = inst.n_blocks * inst.tcfg.m;
    const double c3 = inst.c3;

    struct TrialRow {
        bool ok = false;
        std::string failure;
        std::string fhat;
        double tournament_excess = std::numeric_limits<double>::infinity();
        std::string erm;
        double erm_excess = std::numeric_limits<double>::infinity();
        std::size_t f1 = 0, fbar1 = 0, f2 = 0;
    };
    std::vector<TrialRow> rows(trials);

    parallel::parallel_for(trials, jobs, [&](std::size_t trial) {
        TrialRow& row = rows[trial];
        const auto res = tournament::run_procedure(inst.triplet, N, inst.tcfg, seed, seed, trial);
        row.ok = res.ok;
        row.f1 = res.stage1.survivors.size();
        row.fbar1 = res.stage2.labels.size();
        row.f2 = res.stage2.survivors.size();
        if (res.ok) {
            row.fhat = res.stage2.labels[res.fhat_index];
            row.tournament_excess = verify::excess_risk(inst.triplet, res.fhat_row);
        } else {
            row.failure = res.failure;
            row.fhat = "-";
        }
        if (trial == 0)
            tournament::save_audit_csv((dir / "audit_trial0.csv").string(), res, inst.tcfg,
                                       cfg.hash(), seed);
        // ERM on the same total sample (all four chunks)
        const auto s = sampler::draw_sample(inst.triplet, 4 * N, seed, trial);
        const std::size_t erm_idx = tournament::erm_baseline(inst.triplet, s);
        row.erm = inst.triplet.cls().label(erm_idx);
        row.erm_excess = verify::excess_risk(inst.triplet, erm_idx);
    });

    auto extras = inst.tcfg.describe();
    extras.push_back("N_per_stage = " + std::to_string(N));
    extras.push_back("trials = " + std::to_string(trials));
    for (const auto& l : cfg.echo_lines()) extras.push_back("cfg." + l);

    report::CsvWriter trial_csv(
        (dir / "trials.csv").string(),
        report::standard_header("run", cfg.hash(), seed, extras),
        {"trial", "status", "fhat", "tournament_excess", "erm", "erm_excess", "F1_size",
         "Fbar1_size", "F2_size"});
    std::size_t failures = 0, hits = 0;
    std::vector<double> texc, eexc;
    for (std::size_t i = 0; i < trials; ++i) {
        const auto& row = rows[i];
        if (!row.ok) ++failures;
        if (row.ok && row.tournament_excess <= c3 * inst.tcfg.eps) ++hits;
        texc.push_back(row.tournament_excess);
        eexc.push_back(row.erm_excess);
        trial_csv.row({std::to_string(i), row.ok ? "ok" : row.failure, row.fhat,
                       report::fmt(row.tournament_excess), row.erm, report::fmt(row.erm_excess),
                       std::to_string(row.f1), std::to_string(row.fbar1),
                       std::to_string(row.f2)});
    }
    trial_csv.close();

    report::CsvWriter summary_csv(
        (dir / "summary.csv").string(),
        report::standard_header("run-summary", cfg.hash(), seed, extras),
        {"metric", "tournament", "erm"});
    const double conf = static_cast<double>(hits) / static_cast<double>(trials);
    summary_csv.row({"excess_q50", quantile_str(texc, 0.50), quantile_str(eexc, 0.50)});
    summary_csv.row({"excess_q90", quantile_str(texc, 0.90), quantile_str(eexc, 0.90)});
    summary_csv.row({"excess_q95", quantile_str(texc, 0.95), quantile_str(eexc, 0.95)});
    summary_csv.row({"excess_q99", quantile_str(texc, 0.99), quantile_str(eexc, 0.99)});
    summary_csv.row({"pr_excess_le_c3_eps", report::fmt(conf), "-"});
    summary_csv.row({"c3", report::fmt(c3), "-"});
    summary_csv.row({"structured_failures", std::to_string(failures), "-"});
    summary_csv.close();

    if (failures > 0) {
        for (std::size_t i = 0; i < trials; ++i)
            if (!rows[i].ok) {
                std::fprintf(stderr, "run: trial %zu structured failure: %s\n", i,
                             rows[i].failure.c_str());
                break;
            }
        return 1;
    }
    return 0;
}

int cmd_fixed_point(const config::Config& cfg) {
    const auto inst = build_instance(cfg);
    const auto dir = out_dir(cfg);
    const std::uint64_t seed = cfg.get_u64("seed", 1);

    complexity::SearchOptions opts;
    opts.seed = seed;
    opts.trials = cfg.get_size("fp.trials", opts.trials);
    opts.trials_cap = cfg.get_size("fp.trials_cap", opts.trials_cap);
    opts.r_lo = cfg.get_double("fp.r_lo", opts.r_lo);
    opts.r_hi = cfg.get_double("fp.r_hi", opts.r_hi);
    opts.N_max = cfg.get_size("fp.n_max", opts.N_max);

    const auto kind = cfg.get_str("fp.kind", "quadratic") == "multiplier"
                          ? complexity::Kind::multiplier
                          : complexity::Kind::quadratic;
    const std::string mode = cfg.get_str("fp.mode", "radius");
    const double kappa = cfg.get_double("fp.kappa", 0.5);

    if (mode == "radius") {
        const auto res =
            complexity::fixed_point(inst.triplet, inst.triplet.fstar(), kappa, kind,
                                    cfg.get_size("fp.N", 256), opts);
        complexity::save_trace_csv((dir / "fixed_point_trace.csv").string(), "fixed-point",
                                   res.trace, cfg.hash(), seed);
        report::CsvWriter w((dir / "fixed_point.csv").string(),
                            report::standard_header("fixed-point", cfg.hash(), seed),
                            {"kind", "kappa", "N", "r_star", "bracket_lo", "bracket_hi"});
        w.row({complexity::kind_name(kind), report::fmt(kappa), std::to_string(res.N),
               report::fmt(res.r_star), report::fmt(res.bracket_lo),
               report::fmt(res.bracket_hi)});
        w.close();
        return 0;
    }
    if (mode == "samples") {
        const auto res = complexity::sample_complexity(inst.triplet, cfg.get_double("fp.r", 1.0),
                                                       kappa, kind, opts);
        complexity::save_trace_csv((dir / "sample_complexity_trace.csv").string(),
                                   "sample-complexity", res.trace, cfg.hash(), seed);
        report::CsvWriter w(
            (dir / "sample_complexity.csv").string(),
            report::standard_header("sample-complexity", cfg.hash(), seed),
            {"kind", "kappa", "r", "N_star", "osc_at_N", "stderr_at_N", "osc_at_half",
             "stderr_at_half"});
        w.row({complexity::kind_name(kind), report::fmt(kappa), report::fmt(res.r),
               std::to_string(res.N_star), report::fmt(res.at_N.value),
               report::fmt(res.at_N.stderr_), report::fmt(res.at_half.value),
               report::fmt(res.at_half.stderr_)});
        w.close();
        return 0;
    }
    if (mode == "n0") {
        const auto rep = complexity::sample_size_recipe(
            inst.triplet, inst.tcfg.eps, inst.tcfg.delta, cfg.get_double("c0", 1.0),
            cfg.get_double("c1", 1.0), cfg.get_double("c2", 1.0), opts,
            cfg.get_str("fp.branch", "proper") == "unrestricted");
        report::CsvWriter w((dir / "n0.csv").string(),
                            report::standard_header("n0", cfg.hash(), seed),
                            {"N_Q", "N_M", "confidence_addend", "N0", "c0", "c1", "c2",
                             "unrestricted", "subset_sup_exact", "subsets_checked"});
        w.row({std::to_string(rep.N_Q), std::to_string(rep.N_M),
               report::fmt(rep.confidence_addend), report::fmt(rep.N0), report::fmt(rep.c0),
               report::fmt(rep.c1), report::fmt(rep.c2), rep.unrestricted ? "1" : "0",
               rep.subset_sup_exact ? "1" : "0", std::to_string(rep.subsets_checked)});
        w.close();
        return 0;
    }
    throw std::runtime_error("config: unknown fp.mode '" + mode + "'");
}

int cmd_verify(const config::Config& cfg) {
    const auto dir = out_dir(cfg);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    std::vector<verify::PropertyReport> reports;

    const std::string props = cfg.get_str("verify.properties", "club,diamond,heart,spade");
    auto wants = [&](const std::string& name) {
        return props.find(name) != std::string::npos;
    };

    if (wants("club") || wants("diamond") || wants("heart") || wants("spade")) {
        const auto inst = build_instance(cfg);
        verify::VerifyOptions vopts;
        vopts.trials = cfg.get_size("trials", 500);
        vopts.n_blocks = inst.n_blocks;
        vopts.seed = seed;
        vopts.jobs = cfg.get_size("jobs", 1);
        if (wants("club")) reports.push_back(verify::check_club(inst.triplet, inst.tcfg, vopts));
        if (wants("diamond"))
            reports.push_back(verify::check_diamond(inst.triplet, inst.tcfg, vopts));
        if (wants("heart") || wants("spade")) {
            auto [heart, spade] = verify::check_heart_spade(inst.triplet, inst.tcfg, vopts);
            if (wants("heart")) reports.push_back(heart);
            if (wants("spade")) reports.push_back(spade);
        }
    }

    if (wants("stable_lb")) {
        const auto W = model::Distribution::parse(cfg.get_str("w.family", "two_point") + " " +
                                                  cfg.get_str("w.a", "2.8284271247461903") + " " +
                                                  cfg.get_str("w.b", "0.125"));
        const double xi = cfg.get_double("w.xi", 0.03);
        const std::size_t m = cfg.get_size("w.m", 64);
        const double gamma_i = verify::distribution_gamma(W, xi, cfg.get_double("p", 6.0));
        const auto params = verify::auto_stable_lb_params(xi, gamma_i, m,
                                                          cfg.get_double("c0", 1.0),
                                                          cfg.get_double("c1", 1.0));
        reports.push_back(verify::check_stable_lower_bound(W, params,
                                                           cfg.get_size("trials", 5000), seed,
                                                           cfg.get_size("jobs", 1)));
    }

    if (wants("small_ball")) {
        const auto W = model::Distribution::parse(cfg.get_str("w.family", "two_point") + " " +
                                                  cfg.get_str("w.a", "2.8284271247461903") + " " +
                                                  cfg.get_str("w.b", "0.125"));
        const auto grid = cfg.get_list("sb.eta_grid", {0.05, 0.1, 0.2, 0.5});
        const auto rep = verify::check_mom_small_ball(
            W, cfg.get_size("sb.m", 3200), grid, cfg.get_size("sb.trials", 100000), seed,
            cfg.get_double("sb.c2", 1.0), cfg.get_size("jobs", 1));
        reports.push_back(rep.base);
        report::CsvWriter w((dir / "small_ball.csv").string(),
                            report::standard_header("small-ball", cfg.hash(), seed,
                                                    {"c3 = " + report::fmt(rep.c3)}),
                            {"eta", "prob", "stderr"});
        for (const auto& row : rep.rows)
            w.row({report::fmt(row.eta), report::fmt(row.prob), report::fmt(row.stderr_)});
        w.close();
    }

    if (wants("norms")) {
        const auto inst = build_instance(cfg);
        const auto qs = cfg.get_list("verify.norms_q", {1.0, 2.0, inst.tcfg.p});
        norms::save_norms_csv((dir / "norms.csv").string(), inst.triplet.cls(), qs, cfg.hash(),
                              seed);
    }

    if (wants("multiplier_norm")) {
        const auto xi = model::Distribution::parse(cfg.get_str("mn.xi", "two_point 2.8284271247461903 0.125"));
        const auto h = model::Distribution::parse(cfg.get_str("mn.h", "two_point 2.8284271247461903 0.125"));
        const auto rep = verify::check_multiplier_norm(
            xi, h, cfg.get_double("p", 6.0), cfg.get_double("M", 2.0),
            cfg.has("mn.c") ? std::optional<double>(cfg.get_double("mn.c", 0.0)) : std::nullopt);
        verify::PropertyReport pr;
        pr.property = "multiplier-norm";
        pr.trials = 1;
        pr.failures = rep.ok ? 0 : 1;
        pr.confidence = rep.ok ? 1.0 : 0.0;
        pr.extra_name = "ratio";
        pr.extra = rep.ratio;
        reports.push_back(pr);
    }

    verify::save_property_csv((dir / "properties.csv").string(), reports, cfg.hash(), seed);
    return 0;
}

int cmd_calibrate(const config::Config& cfg) {
    const auto inst = build_instance(cfg);
    const auto dir = out_dir(cfg);
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    verify::VerifyOptions vopts;
    vopts.trials = cfg.get_size("trials", 500);
    vopts.n_blocks = inst.n_blocks;
    vopts.seed = seed;
    vopts.jobs = cfg.get_size("jobs", 1);

    const auto [alpha, beta] = verify::calibrate_alpha_beta(inst.triplet, inst.tcfg, vopts);
    auto tcfg = tournament::TournamentConfig::make(inst.tcfg.p, inst.tcfg.M, inst.tcfg.eps,
                                                   inst.tcfg.delta, inst.tcfg.theta1,
                                                   inst.tcfg.profile, alpha, beta, inst.tcfg.nu,
                                                   inst.tcfg.gamma);
    const auto club = verify::check_club(inst.triplet, tcfg, vopts);

    report::CsvWriter w((dir / "calibration.csv").string(),
                        report::standard_header("calibrate", cfg.hash(), seed),
                        {"alpha", "beta", "club_confidence", "trials"});
    w.row({report::fmt(alpha), report::fmt(beta), report::fmt(club.confidence),
           std::to_string(club.trials)});
    w.close();
    std::printf("calibrated alpha = %s beta = %s (club confidence %s over %zu trials)\n",
                report::fmt(alpha).c_str(), report::fmt(beta).c_str(),
                report::fmt(club.confidence).c_str(), club.trials);
    return 0;
}

}  // namespace lpt::experiments
