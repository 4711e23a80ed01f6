// test_oracles.hpp — independent oracles used to freeze expected values.
//
// Everything here is deliberately brute force and shares no code path with
// the implementation it checks: exhaustive enumeration over sign/atom
// configurations, all-subset minima, binomial tail sums, and a standalone
// Simpson quadrature.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "lpt/model.hpp"

namespace lpt::test_oracles {

// Exact E sup_{v in hull} |N^{-1} sum eps_i v(X_i)| by enumerating all atom
// assignments and sign patterns of a tabular triplet. `hull_rows` are the
// projected extreme points (values per atom); `xi_row` is nullptr for the
// quadratic process, else the residual function u* - Y per atom (table
// targets only).
inline double exhaustive_oscillation(const model::TabularSpace& space,
                                     const std::vector<std::vector<double>>& hull_rows,
                                     const std::vector<double>* xi_row, std::size_t N) {
    const std::size_t A = space.atom_count();
    std::vector<std::size_t> atom(N, 0);
    double total = 0.0;
    // iterate over A^N atom assignments
    for (;;) {
        double prob = 1.0;
        for (std::size_t i = 0; i < N; ++i) prob *= space.prob(atom[i]);
        if (prob > 0.0) {
            // all 2^N sign patterns, each with weight 2^-N
            double sign_mean = 0.0;
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << N); ++mask) {
                double best = 0.0;
                for (const auto& row : hull_rows) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < N; ++i) {
                        const double eps = (mask >> i) & 1 ? 1.0 : -1.0;
                        const double w = xi_row ? (*xi_row)[atom[i]] : 1.0;
                        acc += eps * w * row[atom[i]];
                    }
                    best = std::max(best, std::abs(acc) / static_cast<double>(N));
                }
                sign_mean += best;
            }
            sign_mean /= static_cast<double>(std::uint64_t{1} << N);
            total += prob * sign_mean;
        }
        // next atom assignment
        std::size_t i = 0;
        while (i < N && ++atom[i] == A) atom[i++] = 0;
        if (i == N) break;
    }
    return total;
}

// Minimum of sum_{i in J^c} x_i over all |J| <= ell, by enumerating subsets.
inline double min_remaining_sum_bruteforce(std::span<const double> x, std::size_t ell) {
    const std::size_t m = x.size();
    double best = 0.0;
    bool first = true;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > ell) continue;
        double rest = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (!((mask >> i) & 1)) rest += x[i];
        if (first || rest < best) {
            best = rest;
            first = false;
        }
    }
    return best;
}

// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// log C(n, k)
inline double log_choose(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Pr(a <= Bin(n, p) <= b), exact sum.
inline double binomial_range_prob(std::size_t n, double p, std::size_t a, std::size_t b) {
    double total = 0.0;
    for (std::size_t k = a; k <= b && k <= n; ++k) {
        const double logp = log_choose(static_cast<double>(n), static_cast<double>(k)) +
                            static_cast<double>(k) * std::log(p) +
                            static_cast<double>(n - k) * std::log1p(-p);
        total += std::exp(logp);
    }
    return total;
}

// Simple recursive Simpson quadrature (independent of the library's).
inline double simpson_quad(const std::function<double(double)>& f, double a, double b,
                           double tol, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double mid, double hi, double flo, double fmid, double fhi,
            int d) -> double {
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, lm, mid, flo, flm, fmid, d - 1) +
               rec(mid, rm, hi, fmid, frm, fhi, d - 1);
    };
    return rec(a, m, b, fa, fm, fb, depth);
}

}  // namespace lpt::test_oracles
