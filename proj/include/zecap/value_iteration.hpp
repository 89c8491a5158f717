#pragma once

// Average-reward value iteration J_n = T J_{n-1}, J_0 = 0, with
//
//   (T J)(s) = max_f min_{s'} { J(s') - log2 max_y sum_{x in G(y,s'|s)} f(x) }.
//
// J_n(s) = log2 W(n,s). For every n, min_s J_n(s)/n <= C0 <= max_s J_n(s)/n.

#include "zecap/channel.hpp"
#include "zecap/errors.hpp"
#include "zecap/inner.hpp"
#include "zecap/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace zecap {

struct ValueFunction {
    std::vector<double> values;
    std::size_t iteration = 0;

    static ValueFunction zero(std::size_t num_states) { return {std::vector<double>(num_states, 0.0), 0}; }

    double min() const { return *std::min_element(values.begin(), values.end()); }
    double max() const { return *std::max_element(values.begin(), values.end()); }
};

struct PolicyTable {
    std::vector<InputPmf> rows; ///< indexed by state
    std::optional<std::size_t> iteration;
};

struct BoundsRow {
    std::size_t n = 0;
    double lower = 0.0;   ///< min_s J_n(s)/n
    double upper = 0.0;   ///< max_s J_n(s)/n
    double gain_lo = 0.0; ///< min_s (J_n - J_{n-1})(s)
    double gain_hi = 0.0; ///< max_s (J_n - J_{n-1})(s)

    friend bool operator==(const BoundsRow&, const BoundsRow&) = default;
};

using BoundsTrace = std::vector<BoundsRow>;

struct CapacityEstimate {
    /// Best J_n/n bounds over the run: max_n lower(n) and min_n upper(n).
    double lower = 0.0;
    double upper = 0.0;
    /// Averaged gain (J_N - J_{N-2})/2 at state 0 for the final iteration N.
    double point_estimate = 0.0;
    /// Min/max over states of the averaged gain at the final iteration.
    double gain_lo = 0.0;
    double gain_hi = 0.0;
    std::size_t iterations = 0;
    /// policies[k-1] is the maximizer of iteration k.
    std::vector<PolicyTable> policies;
};

struct ValueIterationOptions {
    std::size_t max_iters = 200;
    double gap_tol = 1e-3;
    /// Stop as soon as the averaged-gain interval is narrower than gap_tol.
    bool stop_when_converged = true;
    unsigned threads = 1;
};

struct ValueIterationResult {
    PositivityResult positivity;
    CapacityEstimate estimate;
    BoundsTrace trace;
    /// values[n] = J_n for n = 0..iterations.
    std::vector<ValueFunction> values;
    bool converged = false;
};

namespace detail {

template <class Fn>
void for_each_state(std::size_t num_states, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), num_states);
    if (workers <= 1) {
        for (std::size_t s = 0; s < num_states; ++s) fn(s);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t s = w; s < num_states; s += workers) fn(s);
        });
    }
}

} // namespace detail

/// One application of T; also returns the maximizing pmf per state.
inline std::pair<ValueFunction, PolicyTable> apply_t(const Channel& ch, const ValueFunction& j,
                                                     unsigned threads = 1) {
    const std::size_t ns = ch.num_states();
    ValueFunction out{std::vector<double>(ns), j.iteration + 1};
    PolicyTable policy{std::vector<InputPmf>(ns), j.iteration + 1};
    std::vector<std::exception_ptr> errors(ns);
    detail::for_each_state(ns, threads, [&](std::size_t s) {
        try {
            auto sol = solve_inner(ch, s, j.values);
            out.values[s] = sol.value;
            policy.rows[s] = std::move(sol.pmf);
        } catch (...) {
            errors[s] = std::current_exception();
        }
    });
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return {std::move(out), std::move(policy)};
}

/// (J_n - J_{n-2}) / 2 per state; J_1 - J_0 when n = 1.
inline std::vector<double> averaged_gain(const std::vector<ValueFunction>& values, std::size_t n) {
    if (n == 0 || n >= values.size()) throw IterationOutOfRangeError("averaged gain needs 1 <= n <= last iteration");
    const std::size_t ns = values[n].values.size();
    std::vector<double> gain(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        gain[s] = n == 1 ? values[1].values[s] - values[0].values[s]
                         : 0.5 * (values[n].values[s] - values[n - 2].values[s]);
    }
    return gain;
}

inline BoundsRow bounds_row(const std::vector<ValueFunction>& values, std::size_t n) {
    const auto& cur = values[n].values;
    const auto& prev = values[n - 1].values;
    BoundsRow row;
    row.n = n;
    row.lower = values[n].min() / double(n);
    row.upper = values[n].max() / double(n);
    row.gain_lo = std::numeric_limits<double>::infinity();
    row.gain_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < cur.size(); ++s) {
        row.gain_lo = std::min(row.gain_lo, cur[s] - prev[s]);
        row.gain_hi = std::max(row.gain_hi, cur[s] - prev[s]);
    }
    return row;
}

/**
 * Iterates J_n = T J_{n-1} from J_0 = 0.
 *
 * Convergence is judged on the averaged gain (J_n - J_{n-2})/2, whose
 * min/max over states bracket C0 and which settles even on periodic
 * chains where the one-step gain oscillates. When the positivity game
 * reports zero capacity the iteration still runs (the trace is kept for
 * inspection) but the estimate is pinned to 0.
 */
inline ValueIterationResult run_value_iteration(const Channel& ch, const ValueIterationOptions& opt = {}) {
    if (opt.max_iters == 0) throw Error("max_iters must be positive");
    if (!(opt.gap_tol >= 0.0)) throw Error("gap_tol must be non-negative");

    ValueIterationResult result;
    result.positivity = decide_positivity(ch);
    result.values.push_back(ValueFunction::zero(ch.num_states()));

    auto& est = result.estimate;
    est.lower = -std::numeric_limits<double>::infinity();
    est.upper = std::numeric_limits<double>::infinity();
    std::vector<double> gain;
    for (std::size_t n = 1; n <= opt.max_iters; ++n) {
        auto [next, policy] = apply_t(ch, result.values.back(), opt.threads);
        result.values.push_back(std::move(next));
        est.policies.push_back(std::move(policy));
        result.trace.push_back(bounds_row(result.values, n));
        est.lower = std::max(est.lower, result.trace.back().lower);
        est.upper = std::min(est.upper, result.trace.back().upper);
        est.iterations = n;

        gain = averaged_gain(result.values, n);
        const auto [lo, hi] = std::minmax_element(gain.begin(), gain.end());
        est.gain_lo = *lo;
        est.gain_hi = *hi;
        est.point_estimate = gain.front();
        result.converged = n >= 2 && est.gain_hi - est.gain_lo <= opt.gap_tol;
        if (result.converged && opt.stop_when_converged) break;
    }

    if (result.positivity.decision == Decision::capacity_zero) {
        est.lower = est.upper = est.point_estimate = est.gain_lo = est.gain_hi = 0.0;
    }
    return result;
}

/// W(n,s) = 2^{J_n(s)} for n = 0..horizon; rows indexed by n.
inline std::vector<std::vector<double>> w_table(const Channel& ch, std::size_t horizon) {
    std::vector<std::vector<double>> table;
    ValueFunction j = ValueFunction::zero(ch.num_states());
    for (std::size_t n = 0;; ++n) {
        std::vector<double> row(j.values.size());
        for (std::size_t s = 0; s < row.size(); ++s) {
            row[s] = std::exp2(j.values[s]);
            if (!std::isfinite(row[s])) {
                throw OverflowError("W(" + std::to_string(n) + ", s) exceeds the double range");
            }
        }
        table.push_back(std::move(row));
        if (n == horizon) break;
        j = apply_t(ch, j).first;
    }
    return table;
}

/// Zero-error feedback capacity of a single-state channel: -log2 min_f max_y sum_{G(y)} f.
inline double dmc_capacity(const Channel& ch) {
    as_dmc(ch);
    if (decide_positivity(ch).decision == Decision::capacity_zero) return 0.0;
    const std::vector<double> zero(1, 0.0);
    return solve_inner(ch, 0, zero).value;
}

inline void write_trace_csv(std::ostream& os, const BoundsTrace& trace) {
    std::ostringstream line;
    os << "n,lower,upper,gain_lo,gain_hi\n";
    for (const auto& r : trace) {
        line.str("");
        line << std::setprecision(12) << r.n << ',' << r.lower << ',' << r.upper << ','
             << r.gain_lo << ',' << r.gain_hi << '\n';
        os << line.str();
    }
}

inline BoundsTrace read_trace_csv(std::istream& is) {
    BoundsTrace trace;
    std::string line;
    if (!std::getline(is, line) || line != "n,lower,upper,gain_lo,gain_hi") {
        throw ParseError("trace csv: missing or unexpected header");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        BoundsRow row;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        if (!(fields >> row.n >> c1 >> row.lower >> c2 >> row.upper >> c3 >> row.gain_lo >> c4 >> row.gain_hi) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
            throw ParseError("trace csv: malformed row '" + line + "'");
        }
        trace.push_back(row);
    }
    return trace;
}

} // namespace zecap
