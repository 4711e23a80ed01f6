// complexity.hpp — star-hull localization, Rademacher/multiplier oscillation
// estimates, the fixed points r*_Q / r*_M, and sample complexities N_Q / N_M.
//
// The supremum over U_{h,r} = star(U-h,0) ∩ rD reduces to the finite set of
// projected extreme points lambda_u (u-h), lambda_u = min(1, r/||u-h||): the
// objective is |linear functional| and the hull is a union of segments
// [0, lambda_u (u-h)], so the maximum sits at an endpoint.
//
// Search decisions follow a fixed noise discipline: every inequality decision
// requires a 2-stderr separation; otherwise trials are doubled up to a cap
// and then the search errors out instead of silently misbracketing.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpt/model.hpp"

namespace lpt::complexity {

enum class Kind { quadratic, multiplier };
const char* kind_name(Kind k);

// Exact L_2 distance ||u - h||_2 between class members (tabular: atom sums;
// linear: i.i.d.-coordinate second-moment formula).
double member_distance(const model::HypothesisClass& cls, std::size_t u, std::size_t h);

struct StarHullQuery {
    std::size_t center = 0;
    double r = 0.0;
    std::vector<double> dist;    // ||u - center||_2 per member
    std::vector<double> lambda;  // min(1, r / dist), 1 when dist = 0
};

// Shrink factors for every member; exact norms.
StarHullQuery star_hull(const model::HypothesisClass& cls, std::size_t center, double r);

// lambda_u (u - h) as a representation row; the zero function when u = center.
std::vector<double> star_project(const model::HypothesisClass& cls, std::size_t u,
                                 std::size_t center, double r);

struct OscillationEstimate {
    Kind kind = Kind::quadratic;
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
    std::size_t N = 0;
};

// Monte Carlo estimate of E sup_{v in U_{h,r}} |N^{-1} sum eps_i v(X_i)|
// (quadratic) or the xi-weighted version with xi_i = u*(X_i) - Y_i
// (multiplier). Each trial draws a fresh sample and sign vector from
// (seed, trial) substreams, so estimates at different radii share draws and
// the empirical ratio phi(r) is pointwise monotone.
// `subset`: optional member index set generating the hull (triplet (U,X,Y)
// with U a subset of the class); must contain the center.
// `xi_member`: the u* whose residuals weight the multiplier process; default
// resolves to the (sub)triplet risk minimizer.
OscillationEstimate estimate_oscillation(const model::Triplet& t, std::size_t center, double r,
                                         std::size_t N, std::size_t trials, Kind kind,
                                         std::uint64_t seed,
                                         const std::vector<std::size_t>* subset = nullptr,
                                         std::size_t xi_member = SIZE_MAX);

struct SearchOptions {
    std::size_t trials = 64;         // initial trials per oscillation estimate
    std::size_t trials_cap = 65536;  // noise-discipline doubling cap; the final
                                     // bisection steps sit closest to the target
    double r_lo = 1e-3;
    double r_hi = 0.0;              // 0 = auto: 2 * max member distance
    double rel_width = 1e-2;        // bracket termination
    std::size_t N_max = 1 << 20;    // sample-complexity search ceiling
    std::uint64_t seed = 1;
};

struct TracePoint {
    double x = 0.0;  // r (fixed point) or N (sample complexity)
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
    bool below = false;  // decision: oscillation <= target
};

struct FixedPointResult {
    double r_star = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    Kind kind = Kind::quadratic;
    double kappa = 0.0;
    std::size_t N = 0;
    std::vector<TracePoint> trace;
};

// r*(U,h,kappa) = inf{ r > 0 : osc(r) <= kappa r }   (quadratic)
//                 inf{ r > 0 : osc(r) <= kappa r^2 } (multiplier)
// Bracketing search on the monotone ratio phi(r); relative width <= rel_width.
FixedPointResult fixed_point(const model::Triplet& t, std::size_t center, double kappa, Kind kind,
                             std::size_t N, const SearchOptions& opts = {});

struct SampleComplexityResult {
    std::size_t N_star = 0;
    OscillationEstimate at_N;      // estimate at N*
    OscillationEstimate at_half;   // estimate at max(1, N*/2)
    Kind kind = Kind::quadratic;
    double kappa = 0.0, r = 0.0;
    std::vector<TracePoint> trace;
};

// N_Q / N_M: min{ N : osc_N(r) <= kappa r (resp. kappa r^2) }; doubling search
// then bisection on the dyadic bracket, same noise discipline.
SampleComplexityResult sample_complexity(const model::Triplet& t, double r, double kappa,
                                         Kind kind, const SearchOptions& opts = {},
                                         std::size_t center_override = SIZE_MAX,
                                         const std::vector<std::size_t>* subset = nullptr);

struct N0Report {
    std::size_t N_Q = 0, N_M = 0;
    double confidence_addend = 0.0;  // (M^2/eps)^{p/(p-2)} log(2/delta)
    double N0 = 0.0;                 // c0 (2 max{N_Q,N_M} + confidence_addend)
    double c0 = 1.0, c1 = 1.0, c2 = 1.0;
    bool unrestricted = false;
    bool subset_sup_exact = false;   // true when the subset supremum was enumerated
    std::size_t subsets_checked = 1;
};

// Sample-size recipe assembled from the two sample-complexity estimates plus
// the confidence term. `unrestricted` takes the supremum of the estimates
// over all subsets of bar F containing f* (enumerated when |F| <= 5 and the
// target admits subset triplets; otherwise bar-F level with the gap flagged).
N0Report sample_size_recipe(const model::Triplet& t, double eps, double delta, double c0, double c1,
                         double c2, const SearchOptions& opts = {}, bool unrestricted = false);

void save_trace_csv(const std::string& path, const std::string& what,
                    const std::vector<TracePoint>& trace, std::uint64_t config_hash,
                    std::uint64_t seed);

}  // namespace lpt::complexity
