#pragma once

// Checks candidate solutions (g, rho) of g(s) + rho = (T g)(s). A bounded
// solution pins the capacity to rho.

#include "zecap/channel.hpp"
#include "zecap/errors.hpp"
#include "zecap/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace zecap {

struct BellmanCandidate {
    std::vector<double> bias; ///< g(s)
    double gain = 0.0;        ///< rho, bits per channel use
};

struct BellmanReport {
    std::vector<double> residuals; ///< (T g)(s) - g(s) - rho
    double max_abs_residual = 0.0;
    /// max_s - min_s of (T g)(s) - g(s); at most 2 * tolerance when passing.
    double gain_spread = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Shifts g so that its minimum is 0; T commutes with constant shifts.
inline BellmanCandidate normalized(BellmanCandidate cand) {
    if (cand.bias.empty()) return cand;
    const double m = *std::min_element(cand.bias.begin(), cand.bias.end());
    for (double& g : cand.bias) g -= m;
    return cand;
}

inline BellmanReport verify_bellman(const Channel& ch, const BellmanCandidate& candidate, double tol) {
    if (candidate.bias.size() != ch.num_states()) throw Error("candidate bias size does not match the channel");
    const BellmanCandidate cand = normalized(candidate);
    const auto image = apply_t(ch, ValueFunction{cand.bias, 0}).first;

    BellmanReport report;
    report.tolerance = tol;
    double lo = image.values[0] - cand.bias[0];
    double hi = lo;
    for (std::size_t s = 0; s < cand.bias.size(); ++s) {
        const double step = image.values[s] - cand.bias[s];
        lo = std::min(lo, step);
        hi = std::max(hi, step);
        report.residuals.push_back(step - cand.gain);
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(report.residuals.back()));
    }
    report.gain_spread = hi - lo;
    report.pass = report.max_abs_residual <= tol;
    return report;
}

/**
 * Relative-value candidate from iteration n of a run.
 *
 * Uses the two-step average H_n = (J_n + J_{n-1})/2 so that periodic
 * chains still yield a stationary bias: rho = min_s (H_n - H_{n-1})(s),
 * g = H_n - min H_n.
 */
inline BellmanCandidate extract_candidate(const ValueIterationResult& run, std::size_t n) {
    if (n < 2 || n >= run.values.size()) {
        throw IterationOutOfRangeError("candidate extraction needs 2 <= n <= " +
                                       std::to_string(run.values.size() - 1));
    }
    const auto gain = averaged_gain(run.values, n);
    BellmanCandidate cand;
    cand.gain = *std::min_element(gain.begin(), gain.end());
    const auto& cur = run.values[n].values;
    const auto& prev = run.values[n - 1].values;
    for (std::size_t s = 0; s < cur.size(); ++s) cand.bias.push_back(0.5 * (cur[s] + prev[s]));
    return normalized(std::move(cand));
}

struct CubicGain {
    double a1 = 0.0;  ///< root in (0,1) of a = (1-a)^3
    double rho = 0.0; ///< log2((1-a1)/a1)
};

/// Closed-form gain of the three-state example: bisection on a - (1-a)^3.
inline CubicGain solve_example3_gain() {
    auto f = [](double a) { return a - (1.0 - a) * (1.0 - a) * (1.0 - a); };
    double lo = 0.0, hi = 1.0; // f(0) = -1, f(1) = 1
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    CubicGain out;
    out.a1 = 0.5 * (lo + hi);
    out.rho = std::log2((1.0 - out.a1) / out.a1);
    return out;
}

} // namespace zecap
