// fixtures.hpp — named experiment instances shared by the CLI and the test
// suites.
//
// two_point_extremal: Pr(f = K) = r^2/K^2 with K = M^{p/(p-2)} / r^{2/(p-2)},
// so ||f||_2 = r and ||f||_p = M — the construction showing that bounded
// L_p classes admit no nontrivial uniform small-ball or integrability
// constants.
#pragma once

#include <cstdint>

#include "lpt/model.hpp"
#include "lpt/tournament.hpp"

namespace lpt::fixtures {

struct TwoPointExtremal {
    model::SpacePtr space;  // atoms {q, 1-q}
    model::FunctionTable f;
    double K = 0.0;
    double q = 0.0;
};

TwoPointExtremal two_point_extremal(double p, double M, double r);

// 20-member tabular class on a 6-atom space: two-point members at distances
// 0.1r..6r from f* = 0 across sparsity levels q = 1/32..1/2, heavy-tailed
// symmetric two-point noise. Used by the (club)(diamond)(heart)(spade)
// suites. p = 6, M = 2, r = 0.25, theta1 = 8.
struct ClubSuite {
    model::Triplet triplet;
    tournament::TournamentConfig cfg;
    std::size_t n_blocks = 64;
};

ClubSuite club_suite(double delta = 0.2);

// Two-member tabular class {-d/2, +d/2} with ||d||_2 = dist_in_r * r and
// noiseless target = member 0; the classic distance-oracle pair instance.
struct PairFixture {
    model::Triplet triplet;
    tournament::TournamentConfig cfg;
    std::size_t n_blocks = 64;
};

PairFixture two_member_pair(double p = 6.0, double M = 2.0, double r = 0.2,
                            double dist_in_r = 10.0, double delta = 0.2);

// Linear class of 30 members over i.i.d. Student-t(5.5) features (p = 5
// moments bounded by M = 2), Student-t noise, eps chosen so m = 30: a cluster
// of 18 near-optimal members plus 12 far decoys that the tournament must
// eliminate. theta1 < 1 is recorded in the config; c3 is the excess-risk
// acceptance multiple.
struct LinearSuite {
    model::Triplet triplet;
    tournament::TournamentConfig cfg;
    std::size_t n_blocks = 50;
    double c3 = 2.0;
};

LinearSuite linear_student_t_suite(double delta = 0.1);

}  // namespace lpt::fixtures
