#pragma once

// Exhaustive search of the inner problem over pmfs whose entries are
// multiples of 1/resolution. Independent of the LP route; used to check it.
//
// The search is a depth-first enumeration of the grid with branch-and-bound
// pruning. Pruning only discards subtrees that provably cannot beat the
// incumbent, so the result is the exact grid optimum (up to 1e-12).

#include "zecap/channel.hpp"
#include "zecap/errors.hpp"
#include "zecap/inner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace zecap {

inline constexpr std::size_t grid_oracle_max_inputs = 5;

namespace detail {

struct GridSearch {
    std::size_t nx;
    std::int64_t resolution;
    // Constraint k covers inputs members[k]; its load is sum f / scale[k].
    std::vector<std::vector<std::size_t>> members;
    std::vector<double> inv_scale;
    // Per input: sum over covering constraints of 1/scale, and the constraint list.
    std::vector<double> cover_weight;
    std::vector<std::vector<std::size_t>> covering;

    std::vector<std::int64_t> counts;
    std::vector<double> partial; // assigned mass per constraint (in grid units)
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::int64_t> best_counts;

    double load_of(const std::vector<std::int64_t>& c) const {
        double load = 0.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            double sum = 0.0;
            for (std::size_t x : members[k]) sum += double(c[x]);
            load = std::max(load, sum * inv_scale[k]);
        }
        return load / double(resolution);
    }

    void offer(const std::vector<std::int64_t>& c) {
        const double load = load_of(c);
        if (load < best) {
            best = load;
            best_counts = c;
        }
    }

    // Lower bound on the final load given inputs [0, depth) fixed and `left` units unassigned.
    double bound(std::size_t depth, std::int64_t left) const {
        double assigned_max = 0.0;
        double weighted = 0.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            assigned_max = std::max(assigned_max, partial[k] * inv_scale[k]);
            weighted += partial[k] * inv_scale[k];
        }
        double min_cover = std::numeric_limits<double>::infinity();
        for (std::size_t x = depth; x < nx; ++x) min_cover = std::min(min_cover, cover_weight[x]);
        if (depth < nx) weighted += double(left) * min_cover;
        const double average = weighted / double(members.size());
        return std::max(assigned_max, average) / double(resolution);
    }

    void search(std::size_t depth, std::int64_t left) {
        if (bound(depth, left) >= best - 1e-12) return;
        if (depth + 1 == nx) {
            counts[depth] = left;
            offer(counts);
            return;
        }
        for (std::int64_t c = 0; c <= left; ++c) {
            counts[depth] = c;
            for (std::size_t k : covering[depth]) partial[k] += double(c);
            search(depth + 1, left - c);
            for (std::size_t k : covering[depth]) partial[k] -= double(c);
        }
        counts[depth] = 0;
    }
};

} // namespace detail

inline InnerSolution grid_oracle(const Channel& ch, std::size_t s, std::span<const double> j,
                                 std::size_t resolution) {
    const std::size_t nx = ch.num_inputs();
    if (nx > grid_oracle_max_inputs) {
        throw AlphabetTooLargeError("grid oracle supports at most 5 inputs");
    }
    if (resolution == 0) throw Error("grid resolution must be positive");

    detail::GridSearch g;
    g.nx = nx;
    g.resolution = static_cast<std::int64_t>(resolution);
    g.cover_weight.assign(nx, 0.0);
    g.covering.assign(nx, {});
    const double base = *std::min_element(j.begin(), j.end());
    for (std::size_t sn = 0; sn < ch.num_states(); ++sn) {
        for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
            auto set = ch.support().g(s, sn, y);
            if (set.empty()) continue;
            const std::size_t k = g.members.size();
            g.members.emplace_back(set.begin(), set.end());
            g.inv_scale.push_back(std::exp2(-(j[sn] - base)));
            for (std::size_t x : set) {
                g.cover_weight[x] += g.inv_scale.back();
                g.covering[x].push_back(k);
            }
        }
    }
    g.partial.assign(g.members.size(), 0.0);
    g.counts.assign(nx, 0);

    // Seed the incumbent with the corners and the grid point nearest the barycenter.
    for (std::size_t x = 0; x < nx; ++x) {
        std::vector<std::int64_t> corner(nx, 0);
        corner[x] = g.resolution;
        g.offer(corner);
    }
    std::vector<std::int64_t> center(nx, g.resolution / std::int64_t(nx));
    for (std::int64_t r = g.resolution % std::int64_t(nx), x = 0; r > 0; --r, ++x) ++center[x];
    g.offer(center);

    g.search(0, g.resolution);

    InnerSolution out;
    out.pmf.weights.resize(nx);
    for (std::size_t x = 0; x < nx; ++x) out.pmf.weights[x] = double(g.best_counts[x]) / double(resolution);
    out.value = base - std::log2(g.best);
    return out;
}

} // namespace zecap
