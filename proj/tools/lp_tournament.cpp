// lp-tournament — config-driven experiment runner.
//
//   lp-tournament run         --config cfg [--seed S] [--out DIR] [--trials T] [--jobs J]
//   lp-tournament fixed-point --config cfg ...
//   lp-tournament verify      --config cfg ...
//   lp-tournament calibrate   --config cfg ...
//
// Flags override the corresponding config keys and are recorded in the output
// headers. See README.md for the config schema.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>

#include "lpt/experiments.hpp"
#include "lpt/kernels.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string seed, out, trials, jobs, profile, kernels;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "config file (key = value)")->required();
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)");
    cmd->add_option("--out", flags.out, "output directory (overrides config)");
    cmd->add_option("--trials", flags.trials, "trial count (overrides config)");
    cmd->add_option("--jobs", flags.jobs, "worker threads (overrides config)");
    cmd->add_option("--profile", flags.profile, "constants profile: practical|theory");
    cmd->add_option("--kernels", flags.kernels, "kernel backend: scalar|avx2|neon");
}

lpt::config::Config load_with_overrides(const CommonFlags& flags) {
    auto cfg = lpt::config::Config::load(flags.config_path);
    if (!flags.seed.empty()) cfg.set_override("seed", flags.seed);
    if (!flags.out.empty()) cfg.set_override("out", flags.out);
    if (!flags.trials.empty()) cfg.set_override("trials", flags.trials);
    if (!flags.jobs.empty()) cfg.set_override("jobs", flags.jobs);
    if (!flags.profile.empty()) cfg.set_override("profile", flags.profile);
    if (!flags.kernels.empty()) cfg.set_override("kernels", flags.kernels);
    const std::string k = cfg.get_str("kernels", "");
    if (k == "scalar") lpt::kernels::set_backend(lpt::kernels::Backend::scalar);
    if (k == "avx2") lpt::kernels::set_backend(lpt::kernels::Backend::avx2);
    if (k == "neon") lpt::kernels::set_backend(lpt::kernels::Backend::neon);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"median-of-means tournament learning for bounded L_p classes"};
    app.require_subcommand(1);

    CommonFlags run_flags, fp_flags, verify_flags, cal_flags;
    auto* run = app.add_subcommand("run", "two-stage procedure + ERM baseline, per-trial CSV");
    add_common(run, run_flags);
    auto* fp = app.add_subcommand("fixed-point", "fixed points r*_Q/r*_M, N_Q/N_M, N0 recipe");
    add_common(fp, fp_flags);
    auto* verify = app.add_subcommand("verify", "suitability and lower-bound property checks");
    add_common(verify, verify_flags);
    auto* cal = app.add_subcommand("calibrate", "grid-search the oracle constants (alpha, beta)");
    add_common(cal, cal_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return lpt::experiments::cmd_run(load_with_overrides(run_flags));
        if (fp->parsed()) return lpt::experiments::cmd_fixed_point(load_with_overrides(fp_flags));
        if (verify->parsed())
            return lpt::experiments::cmd_verify(load_with_overrides(verify_flags));
        if (cal->parsed()) return lpt::experiments::cmd_calibrate(load_with_overrides(cal_flags));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "lp-tournament: %s\n", e.what());
        return 1;
    }
    return 0;
}
