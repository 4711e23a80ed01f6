#include "lpt/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace lpt::fixtures {

TwoPointExtremal two_point_extremal(double p, double M, double r) {
    if (!(p > 2.0) || !(M > 0.0) || !(r > 0.0) || !(r < M))
        throw std::runtime_error("two_point_extremal: need p > 2 and 0 < r < M");
    const double K = std::pow(M, p / (p - 2.0)) / std::pow(r, 2.0 / (p - 2.0));
    const double q = (r * r) / (K * K);
    auto space = model::TabularSpace::create({q, 1.0 - q});
    auto f = model::FunctionTable::create(space, {K, 0.0});
    return TwoPointExtremal{std::move(space), std::move(f), K, q};
}

ClubSuite club_suite(double delta) {
    const double p = 6.0, M = 2.0, r = 0.25;
    const double eps = r * r;

    // atom probabilities: sparsity levels for the two-point members
    const auto space = model::TabularSpace::create(
        {1.0 / 32, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2});

    // (atom, distance-to-f* in units of r, sign); K = rho / sqrt(q_atom)
    struct Spec {
        int atom;
        double rho_over_r;
        double sign;
    };
    const Spec specs[] = {
        // q = 1/32
        {0, 0.1, +1}, {1, 0.4, -1}, {0, 0.8, +1}, {1, 1.4, -1}, {0, 2.0, +1}, {1, 2.4, -1},
        // q = 1/16
        {2, 0.2, +1}, {2, 1.2, -1}, {2, 2.8, +1},
        // q = 1/8
        {3, 0.6, -1}, {3, 1.6, +1}, {3, 3.6, -1}, {3, 4.0, +1},
        // q = 1/4
        {4, 1.8, +1}, {4, 4.4, -1}, {4, 5.0, +1},
        // q = 1/2
        {5, 2.2, -1}, {5, 5.2, +1}, {5, 6.0, -1},
    };

    std::vector<std::vector<double>> members;
    members.push_back(std::vector<double>(space->atom_count(), 0.0));  // f* = 0
    for (const auto& s : specs) {
        const double q = space->prob(static_cast<std::size_t>(s.atom));
        const double rho = s.rho_over_r * r;
        std::vector<double> row(space->atom_count(), 0.0);
        row[static_cast<std::size_t>(s.atom)] = s.sign * rho / std::sqrt(q);
        members.push_back(std::move(row));
    }

    auto cls = model::HypothesisClass::tabular(space, std::move(members), p, M);

    // heavy-tailed symmetric two-point noise: |xi| in {0, 0.8}, q = 1/64
    auto noise = model::GenerativeSource::create(
        model::Distribution{model::Family::sym_two_point, 0.8, 1.0 / 64}, p, M);

    ClubSuite fx{model::Triplet::make(std::move(cls), model::TargetRule{0, std::move(noise)}),
                 tournament::TournamentConfig::make(p, M, eps, delta, /*theta1=*/8.0),
                 /*n_blocks=*/64};
    return fx;
}

PairFixture two_member_pair(double p, double M, double r, double dist_in_r, double delta) {
    const double rho = dist_in_r * r;
    // difference d: two-point at q with ||d||_2 = rho, ||d||_p <= 2M; members
    // are -d/2 and +d/2, each with ||.||_p <= M
    const double q = 1.0 / 8;
    const double K = rho / std::sqrt(q);
    const auto space = model::TabularSpace::create({q, 1.0 - q});
    std::vector<std::vector<double>> members{{-K / 2, 0.0}, {K / 2, 0.0}};
    auto cls = model::HypothesisClass::tabular(space, std::move(members), p, M);
    auto zero_noise = model::GenerativeSource::create(
        model::Distribution{model::Family::two_point, 0.0, 1.0}, p, M);
    PairFixture fx{
        model::Triplet::make(std::move(cls), model::TargetRule{0, std::move(zero_noise)}),
        tournament::TournamentConfig::make(p, M, r * r, delta, /*theta1=*/1.0),
        /*n_blocks=*/64};
    return fx;
}

LinearSuite linear_student_t_suite(double delta) {
    const double p = 5.0, M = 2.0, df = 5.5;
    const double eps = 0.08;

    // feature coordinates scaled so ||X_k||_{L_5} = 1
    model::Distribution coord{model::Family::student_t, df, 1.0};
    const double t5 = coord.lp_norm(p);
    coord.b = 1.0 / t5;
    auto features = model::GenerativeSource::create(coord, p, M, /*dim=*/4);

    // noise: Student-t(5.5) with ||nu||_5 = 0.55 (Minkowski budget: the
    // target rule member has ||w0||_1 = 1.4, so ||Y||_5 <= 1.95 <= M)
    model::Distribution ndist{model::Family::student_t, df, 0.55 / t5};
    auto noise = model::GenerativeSource::create(ndist, p, M);

    // 12 decoys concentrated opposite coordinate 0 (excess ~1.6-2.0, above
    // the comparison tolerance) followed by 18 members clustered around
    // w0 = (1.2, 0.2, 0, 0) (excess <= ~0.12). Decoys carry the LOWEST stable
    // ids: f-hat is the first element of F2 in id order, so the run only
    // lands near w0 if P2 actually eliminates the decoys.
    const std::vector<std::vector<double>> weights = {
        {-2.0, 0.0, 0.0, 0.0},   // 0
        {-1.9, 0.1, 0.0, 0.0},   // 1
        {-1.9, 0.0, -0.1, 0.0},  // 2
        {-1.8, 0.0, 0.0, 0.2},   // 3
        {-1.85, 0.15, 0.0, 0.0}, // 4
        {-1.95, 0.0, 0.05, 0.0}, // 5
        {-1.8, -0.2, 0.0, 0.0},  // 6
        {-1.7, 0.0, 0.3, 0.0},   // 7
        {-1.75, 0.25, 0.0, 0.0}, // 8
        {-1.9, 0.0, 0.0, -0.1},  // 9
        {-1.7, -0.3, 0.0, 0.0},  // 10
        {-1.85, -0.15, 0.0, 0.0},// 11
        {1.2, 0.2, 0.6, 0.0},    // 12
        {1.2, 0.2, 0.0, -0.5},   // 13
        {0.8, 0.2, 0.0, 0.0},    // 14
        {1.2, 0.55, 0.0, 0.0},   // 15
        {1.2, 0.2, 0.0, 0.0},    // 16 = w0 (f*)
        {1.2, 0.2, -0.45, 0.0},  // 17
        {1.5, 0.2, 0.0, 0.2},    // 18
        {1.2, 0.0, 0.3, 0.0},    // 19
        {0.9, 0.5, 0.0, 0.0},    // 20
        {1.2, 0.2, 0.3, 0.3},    // 21
        {1.4, 0.2, -0.3, 0.0},   // 22
        {0.7, 0.2, 0.2, 0.0},    // 23
        {1.2, -0.15, 0.0, 0.2},  // 24
        {1.6, 0.4, 0.0, 0.0},    // 25
        {1.2, 0.2, -0.2, -0.2},  // 26
        {1.0, 0.2, 0.0, 0.35},   // 27
        {1.35, 0.05, 0.15, 0.0}, // 28
        {1.2, 0.45, -0.25, 0.0}, // 29
    };

    auto cls = model::HypothesisClass::linear(weights, std::move(features), p, M);
    auto triplet = model::Triplet::make(std::move(cls), model::TargetRule{16, std::move(noise)});

    // theta1 chosen so the derived block size lands exactly on m = 30
    const double theta1 = 30.0 / std::pow(M * M / eps, p / (p - 2.0));
    LinearSuite fx{std::move(triplet),
                   tournament::TournamentConfig::make(p, M, eps, delta, theta1),
                   /*n_blocks=*/50,
                   /*c3=*/2.0};
    return fx;
}

}  // namespace lpt::fixtures
