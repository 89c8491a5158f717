#pragma once

// Finite-horizon positivity game: the encoder picks an input, Nature picks
// the next state, and the reward counts visits to positive states.
//
//   V_0(s) = 0,  V_n(s) = r(s) + max_x min_{s' in S(s,x)} V_{n-1}(s')
//
// The zero-error capacity is positive iff min_s V_|S|(s) > 0.

#include "zecap/channel.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace zecap {

enum class Decision { capacity_zero, capacity_positive };

inline const char* to_string(Decision d) {
    return d == Decision::capacity_zero ? "CapacityZero" : "CapacityPositive";
}

struct PositivityResult {
    /// v_table[n][s] = V_n(s) for n = 0..horizon.
    std::vector<std::vector<int>> v_table;
    Decision decision = Decision::capacity_zero;
    /// zero_sets[n] = { s : V_n(s) = 0 }.
    std::vector<std::vector<std::size_t>> zero_sets;
    /// Maximizing input per state at the final horizon (positive case only).
    std::vector<std::size_t> leader_inputs;
    /// First n with S_n = S_{n+1} non-empty (zero case only).
    std::optional<std::size_t> stable_horizon;
    /// follower[s][x]: a next state in S(s,x) that stays inside S_{n*}.
    /// Defined only for s in S_{n*}; nullopt elsewhere.
    std::vector<std::vector<std::optional<std::size_t>>> follower;

    std::size_t horizon() const { return v_table.empty() ? 0 : v_table.size() - 1; }
    const std::vector<int>& final_values() const { return v_table.back(); }
};

inline int reward(const Channel& ch, std::size_t s) { return is_positive_state(ch, s) ? 1 : 0; }

namespace detail {

/// Worst-case continuation value of input x at s: min over S(s,x) of v.
inline int follower_value(const Channel& ch, std::size_t s, std::size_t x, const std::vector<int>& v) {
    int worst = std::numeric_limits<int>::max();
    for (std::size_t sn : ch.support().next_states(s, x)) worst = std::min(worst, v[sn]);
    return worst;
}

} // namespace detail

inline PositivityResult iterate_v(const Channel& ch, std::size_t horizon) {
    const std::size_t ns = ch.num_states();
    PositivityResult result;
    std::vector<int> rewards(ns);
    for (std::size_t s = 0; s < ns; ++s) rewards[s] = reward(ch, s);

    result.v_table.assign(1, std::vector<int>(ns, 0));
    std::vector<std::size_t> argmax(ns, 0);
    for (std::size_t n = 1; n <= horizon; ++n) {
        const auto& prev = result.v_table.back();
        std::vector<int> next(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            int best = std::numeric_limits<int>::min();
            for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
                int value = detail::follower_value(ch, s, x, prev);
                if (value > best) {
                    best = value;
                    argmax[s] = x;
                }
            }
            next[s] = rewards[s] + best;
        }
        result.v_table.push_back(std::move(next));
    }

    for (const auto& row : result.v_table) {
        std::vector<std::size_t> zeros;
        for (std::size_t s = 0; s < ns; ++s)
            if (row[s] == 0) zeros.push_back(s);
        result.zero_sets.push_back(std::move(zeros));
    }

    const auto& last = result.final_values();
    const bool zero = *std::min_element(last.begin(), last.end()) == 0;
    result.decision = zero ? Decision::capacity_zero : Decision::capacity_positive;

    if (!zero) {
        result.leader_inputs = horizon > 0 ? argmax : std::vector<std::size_t>(ns, 0);
        return result;
    }

    for (std::size_t n = 0; n < horizon; ++n) {
        if (!result.zero_sets[n].empty() && result.zero_sets[n] == result.zero_sets[n + 1]) {
            result.stable_horizon = n;
            break;
        }
    }
    result.follower.assign(ns, std::vector<std::optional<std::size_t>>(ch.num_inputs()));
    if (result.stable_horizon) {
        const auto& stable = result.zero_sets[*result.stable_horizon];
        const auto& v = result.v_table[*result.stable_horizon];
        for (std::size_t s : stable) {
            for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
                for (std::size_t sn : ch.support().next_states(s, x)) {
                    if (v[sn] == 0) {
                        result.follower[s][x] = sn;
                        break;
                    }
                }
            }
        }
    }
    return result;
}

/// Runs the game to horizon |S| and decides whether the capacity is positive.
inline PositivityResult decide_positivity(const Channel& ch) { return iterate_v(ch, ch.num_states()); }

/**
 * Strategy that reaches a positive state with certainty.
 *
 * distance[s] is the number of steps needed against the worst case
 * (0 at positive states, nullopt when Nature can avoid positive states
 * forever); input[s] realizes it.
 */
struct DriveStrategy {
    std::vector<std::optional<std::size_t>> distance;
    std::vector<std::size_t> input;
};

inline DriveStrategy drive_to_positive(const Channel& ch) {
    const std::size_t ns = ch.num_states();
    DriveStrategy drive{std::vector<std::optional<std::size_t>>(ns), std::vector<std::size_t>(ns, 0)};
    for (std::size_t s = 0; s < ns; ++s)
        if (is_positive_state(ch, s)) drive.distance[s] = 0;

    for (std::size_t round = 1; round <= ns; ++round) {
        bool changed = false;
        auto known = drive.distance;
        for (std::size_t s = 0; s < ns; ++s) {
            if (known[s]) continue;
            for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
                auto nexts = ch.support().next_states(s, x);
                bool all_known = std::all_of(nexts.begin(), nexts.end(),
                                             [&](std::size_t sn) { return known[sn].has_value(); });
                if (all_known) {
                    drive.distance[s] = round;
                    drive.input[s] = x;
                    changed = true;
                    break;
                }
            }
        }
        if (!changed) break;
    }
    return drive;
}

} // namespace zecap
