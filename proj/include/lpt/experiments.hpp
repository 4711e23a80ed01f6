// experiments.hpp — config-driven experiment runner backing the CLI commands.
#pragma once

#include <string>

#include "lpt/config.hpp"
#include "lpt/fixtures.hpp"
#include "lpt/model.hpp"
#include "lpt/tournament.hpp"

namespace lpt::experiments {

// Triplet + tournament config resolved from `triplet.kind` and the shared
// parameter keys (overrides applied on top of fixture defaults).
struct Instance {
    model::Triplet triplet;
    tournament::TournamentConfig tcfg;
    std::size_t n_blocks = 64;
    double c3 = 1.0;
};

Instance build_instance(const config::Config& cfg);

// Exit code 0 iff no structured failures and all requested reports written.
int cmd_run(const config::Config& cfg);
int cmd_fixed_point(const config::Config& cfg);
int cmd_verify(const config::Config& cfg);
int cmd_calibrate(const config::Config& cfg);

}  // namespace lpt::experiments
