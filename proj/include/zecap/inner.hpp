#pragma once

// Per-state inner problem of the value iteration:
//
//   max_f min_{s'} { j(s') - log2 max_y sum_{x in G(y,s'|s)} f(x) }
//
// over input pmfs f. Next states that f cannot reach contribute +inf and
// drop out of the min. Solved as a linear program in (u, f):
//
//   minimize u  s.t.  sum_{x in G(y,s'|s)} f(x) <= u * 2^(j(s') - min j),
//                     sum_x f(x) = 1,  f >= 0
//
// and the value is min j - log2 u*.

#include "zecap/channel.hpp"
#include "zecap/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace zecap {

struct InputPmf {
    std::vector<double> weights;

    static InputPmf uniform(std::size_t n) { return {std::vector<double>(n, 1.0 / double(n))}; }
    static InputPmf point(std::size_t n, std::size_t x) {
        InputPmf p{std::vector<double>(n, 0.0)};
        p.weights.at(x) = 1.0;
        return p;
    }

    std::size_t size() const noexcept { return weights.size(); }
    double operator[](std::size_t x) const { return weights[x]; }

    bool valid(double tol = 1e-12) const {
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) return false;
            sum += w;
        }
        return std::abs(sum - 1.0) <= tol;
    }
};

struct InnerSolution {
    double value = 0.0;
    InputPmf pmf;
};

/// One row of the inner LP: inputs of a non-empty G(y,s'|s) and its scale 2^(j~(s')).
struct InnerConstraint {
    std::size_t next_state;
    std::size_t output;
    std::span<const std::size_t> inputs;
    double scale;
};

inline std::vector<InnerConstraint> inner_constraints(const Channel& ch, std::size_t s,
                                                      std::span<const double> j) {
    const double base = *std::min_element(j.begin(), j.end());
    std::vector<InnerConstraint> rows;
    for (std::size_t sn = 0; sn < ch.num_states(); ++sn) {
        for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
            auto set = ch.support().g(s, sn, y);
            if (set.empty()) continue;
            rows.push_back({sn, y, set, std::exp2(j[sn] - base)});
        }
    }
    return rows;
}

/**
 * Objective of the inner problem at a given pmf, straight from its
 * definition. Returns +inf only if f reaches no next state, which cannot
 * happen for a valid pmf on a validated channel.
 */
inline double inner_objective(const Channel& ch, std::size_t s, std::span<const double> j,
                              const InputPmf& f) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t sn = 0; sn < ch.num_states(); ++sn) {
        double mass = 0.0;
        for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
            double sum = 0.0;
            for (std::size_t x : ch.support().g(s, sn, y)) sum += f[x];
            mass = std::max(mass, sum);
        }
        if (mass > 0.0) best = std::min(best, j[sn] - std::log2(mass));
    }
    return best;
}

/// Column layout of the inner LP: u first, then inputs in descending index order.
inline std::size_t inner_lp_column(std::size_t num_inputs, std::size_t x) { return num_inputs - x; }

inline LpProblem build_inner_lp(const Channel& ch, std::size_t s, std::span<const double> j) {
    const std::size_t nx = ch.num_inputs();
    LpProblem lp;
    lp.objective.assign(nx + 1, 0.0);
    lp.objective[0] = 1.0;
    for (const auto& c : inner_constraints(ch, s, j)) {
        std::vector<double> row(nx + 1, 0.0);
        row[0] = -c.scale;
        for (std::size_t x : c.inputs) row[inner_lp_column(nx, x)] = 1.0;
        lp.ub_rows.push_back(std::move(row));
        lp.ub_rhs.push_back(0.0);
    }
    std::vector<double> normalization(nx + 1, 1.0);
    normalization[0] = 0.0;
    lp.eq_rows.push_back(std::move(normalization));
    lp.eq_rhs.push_back(1.0);
    return lp;
}

/// Largest normalized constraint load max sum_G f / 2^(j~(s')); the LP's u at f.
inline double inner_load(const Channel& ch, std::size_t s, std::span<const double> j, const InputPmf& f) {
    double load = 0.0;
    for (const auto& c : inner_constraints(ch, s, j)) {
        double sum = 0.0;
        for (std::size_t x : c.inputs) sum += f[x];
        load = std::max(load, sum / c.scale);
    }
    return load;
}

inline InnerSolution solve_inner(const Channel& ch, std::size_t s, std::span<const double> j) {
    if (j.size() != ch.num_states()) throw Error("value function size does not match the channel");
    for (double v : j) {
        if (!std::isfinite(v)) throw Error("value function must be finite");
    }
    const std::size_t nx = ch.num_inputs();
    const LpSolution sol = solve_lp(build_inner_lp(ch, s, j));

    InnerSolution out;
    out.pmf.weights.assign(nx, 0.0);
    double total = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        out.pmf.weights[x] = std::max(sol.x[inner_lp_column(nx, x)], 0.0);
        total += out.pmf.weights[x];
    }
    if (!(total > 0.0)) throw LpError(LpFailure::infeasible, "inner LP returned an empty pmf");
    for (double& w : out.pmf.weights) w /= total;

    const double load = inner_load(ch, s, j, out.pmf);
    const double base = *std::min_element(j.begin(), j.end());
    out.value = base - std::log2(load);
    return out;
}

} // namespace zecap
