#pragma once

// Ground truth for the number of messages M(n,s) that n channel uses can
// carry with zero error from state s, and explicit feedback code trees.
//
// M(0,s) = 1 and
//   M(n,s) = max sum_x u(x)  over integers u >= 0
//            s.t. sum_{x in G(y,s'|s)} u(x) <= M(n-1,s')  for every (y,s').
//
// u(x) counts the messages whose first letter is x; the constraint says the
// messages compatible with any observation (y,s') must still be separable
// in the remaining n-1 uses.

#include "zecap/channel.hpp"
#include "zecap/errors.hpp"
#include "zecap/inner.hpp"
#include "zecap/positivity.hpp"
#include "zecap/value_iteration.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace zecap {

/// m[n][s] = M(n,s) for n = 0..horizon.
using MessageCountTable = std::vector<std::vector<std::uint64_t>>;

struct MessageCountOptions {
    std::uint64_t count_cap = 10'000;
    std::uint64_t node_budget = 50'000'000;
};

namespace detail {

struct FirstLetterSearch {
    std::vector<std::vector<std::size_t>> rows; // inputs per constraint
    std::vector<std::uint64_t> rhs;
    std::vector<std::vector<std::size_t>> covering; // constraints per input
    std::vector<std::uint64_t> load;
    std::uint64_t best = 0;
    std::uint64_t nodes = 0;
    std::uint64_t budget = 0;

    std::uint64_t headroom(std::size_t x) const {
        std::uint64_t room = UINT64_MAX;
        for (std::size_t k : covering[x]) room = std::min(room, rhs[k] - load[k]);
        return room;
    }

    void search(std::size_t x, std::uint64_t total) {
        if (++nodes > budget) throw SearchBudgetExceededError("message count search exceeded its node budget");
        if (x == covering.size()) {
            best = std::max(best, total);
            return;
        }
        std::uint64_t optimistic = total;
        for (std::size_t z = x; z < covering.size(); ++z) optimistic += headroom(z);
        if (optimistic <= best) return;
        for (std::uint64_t u = headroom(x) + 1; u-- > 0;) {
            for (std::size_t k : covering[x]) load[k] += u;
            search(x + 1, total + u);
            for (std::size_t k : covering[x]) load[k] -= u;
        }
    }
};

} // namespace detail

inline MessageCountTable exact_message_count(const Channel& ch, std::size_t horizon,
                                             const MessageCountOptions& opt = {}) {
    const std::size_t ns = ch.num_states();
    MessageCountTable m(1, std::vector<std::uint64_t>(ns, 1));
    for (std::size_t n = 1; n <= horizon; ++n) {
        std::vector<std::uint64_t> row(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            detail::FirstLetterSearch search;
            search.covering.assign(ch.num_inputs(), {});
            search.budget = opt.node_budget;
            for (std::size_t sn = 0; sn < ns; ++sn) {
                for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
                    auto set = ch.support().g(s, sn, y);
                    if (set.empty()) continue;
                    for (std::size_t x : set) search.covering[x].push_back(search.rows.size());
                    search.rows.emplace_back(set.begin(), set.end());
                    search.rhs.push_back(m[n - 1][sn]);
                }
            }
            search.load.assign(search.rows.size(), 0);
            search.search(0, 0);
            if (search.best > opt.count_cap) {
                throw SearchBudgetExceededError("M(" + std::to_string(n) + ", " + ch.states()[s] +
                                                ") exceeds the count cap");
            }
            row[s] = search.best;
        }
        m.push_back(std::move(row));
    }
    return m;
}

/**
 * Largest m <= limit such that m explicitly labelled messages can be sent
 * from s in n uses, found by enumerating every input assignment at every
 * node of the feedback tree. Exponential; meant for tiny channels only.
 */
inline std::uint64_t max_messages_by_tree_search(const Channel& ch, std::size_t s, std::size_t n,
                                                 std::size_t limit) {
    if (limit > 16) throw SearchBudgetExceededError("tree enumeration is limited to 16 messages");
    const std::size_t nx = ch.num_inputs();
    if (std::pow(double(nx), double(limit)) > 2e6) {
        throw SearchBudgetExceededError("tree enumeration: too many input assignments per node");
    }
    const auto& sup = ch.support();
    std::map<std::tuple<std::uint32_t, std::size_t, std::size_t>, bool> memo;

    auto feasible = [&](auto&& self, std::uint32_t mask, std::size_t state, std::size_t uses) -> bool {
        const int live = std::popcount(mask);
        if (live <= 1) return true;
        if (uses == 0) return false;
        auto key = std::tuple{mask, state, uses};
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < 32; ++i)
            if (mask & (1u << i)) ids.push_back(i);
        std::vector<std::size_t> assign(ids.size(), 0);
        bool ok = false;
        for (;;) {
            bool all = true;
            for (std::size_t sn = 0; sn < ch.num_states() && all; ++sn) {
                for (std::size_t y = 0; y < ch.num_outputs() && all; ++y) {
                    std::uint32_t child = 0;
                    for (std::size_t k = 0; k < ids.size(); ++k)
                        if (sup.contains(state, sn, y, assign[k])) child |= 1u << ids[k];
                    if (child != 0 && !self(self, child, sn, uses - 1)) all = false;
                }
            }
            if (all) {
                ok = true;
                break;
            }
            std::size_t k = 0;
            while (k < assign.size() && ++assign[k] == nx) assign[k++] = 0;
            if (k == assign.size()) break;
        }
        memo[key] = ok;
        return ok;
    };

    std::uint64_t best = 1;
    for (std::size_t count = 2; count <= limit; ++count) {
        const std::uint32_t mask = (count == 32) ? ~0u : ((1u << count) - 1u);
        if (!feasible(feasible, mask, s, n)) break;
        best = count;
    }
    return best;
}

/**
 * Splits `count` messages into per-input group sizes proportional to pmf
 * by largest-remainder apportionment: |m_i/count - pmf(i)| < 1/count where
 * pmf(i) > 0, and m_i = 0 where pmf(i) = 0. Ties go to the lower index.
 */
inline std::vector<std::uint64_t> partition_messages(std::uint64_t count, const InputPmf& pmf) {
    const std::size_t nx = pmf.size();
    double total = 0.0;
    for (double w : pmf.weights) total += w;
    if (nx == 0 || !(total > 0.0)) throw Error("partition needs a non-empty pmf");

    std::vector<std::uint64_t> sizes(nx, 0);
    std::vector<double> remainder(nx, -1.0);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < nx; ++i) {
        if (!(pmf[i] > 0.0)) continue;
        const double quota = double(count) * (pmf[i] / total);
        sizes[i] = static_cast<std::uint64_t>(std::floor(quota));
        remainder[i] = quota - double(sizes[i]);
        assigned += sizes[i];
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < nx; ++i)
        if (pmf[i] > 0.0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    // Rounding drift can leave sum(floor) one short per entry at most.
    for (std::size_t k = 0; assigned < count; k = (k + 1) % order.size(), ++assigned) ++sizes[order[k]];
    while (assigned > count) {
        auto it = std::max_element(sizes.begin(), sizes.end());
        --*it;
        --assigned;
    }
    return sizes;
}

struct CodeTreeBranch {
    std::size_t output;
    std::size_t next_state;
    std::size_t child;
};

struct CodeTreeNode {
    std::size_t state = 0;
    std::size_t depth = 0;
    std::vector<std::uint64_t> messages; ///< live messages, ascending
    std::vector<std::size_t> inputs;     ///< input sent for each live message; empty at leaves
    std::vector<CodeTreeBranch> children;
};

/// Adaptive zero-error code: node 0 is the root; children indexed by observed (y, s').
struct CodeTree {
    std::size_t root_state = 0;
    std::uint64_t message_count = 0;
    std::size_t main_stages = 0;
    std::vector<CodeTreeNode> nodes;
};

struct CodeTreeVerdict {
    bool pass = false;
    std::size_t max_depth = 0;
    std::size_t max_ambiguity = 0;
    std::size_t leaves = 0;
    std::string failure;
};

namespace detail {

class CodeTreeBuilder {
public:
    CodeTreeBuilder(const Channel& ch, std::span<const PolicyTable> policies)
        : ch_(ch), policies_(policies), drive_(drive_to_positive(ch)) {}

    CodeTree build(std::size_t s0, std::uint64_t messages) {
        tree_.root_state = s0;
        tree_.message_count = messages;
        tree_.main_stages = policies_.size();
        std::vector<std::uint64_t> all(messages);
        std::iota(all.begin(), all.end(), std::uint64_t{0});
        grow(s0, 0, std::move(all), 0, 0);
        return std::move(tree_);
    }

private:
    std::size_t grow(std::size_t state, std::size_t depth, std::vector<std::uint64_t> live,
                     std::size_t cleanup_steps, std::size_t cleanup_budget) {
        const std::size_t id = tree_.nodes.size();
        tree_.nodes.push_back({state, depth, std::move(live), {}, {}});
        const std::size_t count = tree_.nodes[id].messages.size();
        if (count <= 1) return id;

        const std::size_t n = policies_.size();
        std::vector<std::size_t> inputs(count);
        if (depth < n) {
            // Stage depth+1 uses the maximizer of iteration n - depth.
            const auto sizes = partition_messages(count, policies_[n - 1 - depth].rows.at(state));
            std::size_t k = 0;
            for (std::size_t x = 0; x < sizes.size(); ++x)
                for (std::uint64_t c = 0; c < sizes[x]; ++c) inputs[k++] = x;
        } else {
            if (depth == n) cleanup_budget = ch_.num_states() * ceil_log2(count);
            if (++cleanup_steps > cleanup_budget) {
                throw CleanupBudgetExceededError("cleanup exceeded |S| * ceil(log2 Z) stages");
            }
            if (auto pair = non_adjacent_pair(ch_, state)) {
                const std::size_t half = (count + 1) / 2;
                for (std::size_t k = 0; k < count; ++k) inputs[k] = k < half ? pair->first : pair->second;
            } else if (drive_.distance[state]) {
                std::fill(inputs.begin(), inputs.end(), drive_.input[state]);
            } else {
                throw CleanupBudgetExceededError("no positive state is reachable with certainty");
            }
        }
        tree_.nodes[id].inputs = inputs;

        const auto& sup = ch_.support();
        for (std::size_t sn = 0; sn < ch_.num_states(); ++sn) {
            for (std::size_t y = 0; y < ch_.num_outputs(); ++y) {
                std::vector<std::uint64_t> compatible;
                for (std::size_t k = 0; k < count; ++k)
                    if (sup.contains(state, sn, y, inputs[k])) compatible.push_back(tree_.nodes[id].messages[k]);
                if (compatible.empty()) continue;
                const std::size_t child = grow(sn, depth + 1, std::move(compatible), cleanup_steps, cleanup_budget);
                tree_.nodes[id].children.push_back({y, sn, child});
            }
        }
        return id;
    }

    static std::size_t ceil_log2(std::uint64_t z) {
        std::size_t bits = 0;
        while ((std::uint64_t{1} << bits) < z) ++bits;
        return bits;
    }

    const Channel& ch_;
    std::span<const PolicyTable> policies_;
    DriveStrategy drive_;
    CodeTree tree_;
};

} // namespace detail

/**
 * Builds a zero-error feedback code for `messages` messages from s0.
 *
 * policies[k-1] is the value-iteration maximizer of iteration k; with
 * n = policies.size(), stage k of the code partitions the live messages
 * by the iteration n+1-k policy. Whatever is still ambiguous after n
 * stages is resolved by driving to a positive state and splitting across
 * a non-adjacent input pair.
 */
inline CodeTree build_code_tree(const Channel& ch, std::size_t s0, std::span<const PolicyTable> policies,
                                std::uint64_t messages) {
    if (s0 >= ch.num_states()) throw Error("initial state out of range");
    if (messages == 0) throw Error("a code needs at least one message");
    return detail::CodeTreeBuilder(ch, policies).build(s0, messages);
}

/// floor(W(n, s0)) messages with the first n policies of `run`.
inline CodeTree build_code_tree(const Channel& ch, std::size_t s0, std::size_t n, const ValueIterationResult& run) {
    if (n >= run.values.size()) throw IterationOutOfRangeError("run has fewer than n iterations");
    const double w = std::exp2(run.values[n].values.at(s0));
    const auto messages = static_cast<std::uint64_t>(std::floor(w + 1e-9));
    return build_code_tree(ch, s0, std::span(run.estimate.policies).first(n), messages);
}

/**
 * Walks every channel-consistent observation path. Each node's live set is
 * recomputed from its parent's assignment rather than trusted; the code is
 * zero-error iff every leaf is reached with at most one live message.
 */
inline CodeTreeVerdict verify_code_tree(const Channel& ch, const CodeTree& tree) {
    CodeTreeVerdict verdict;
    if (tree.nodes.empty()) {
        verdict.failure = "empty tree";
        return verdict;
    }
    const auto& sup = ch.support();
    auto fail = [&](const std::string& why) {
        if (verdict.failure.empty()) verdict.failure = why;
    };

    std::vector<std::uint64_t> root(tree.message_count);
    std::iota(root.begin(), root.end(), std::uint64_t{0});
    if (tree.nodes[0].messages != root || tree.nodes[0].state != tree.root_state) fail("root does not hold every message");

    struct Item {
        std::size_t node;
        std::size_t depth;
    };
    std::vector<Item> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [id, depth] = stack.back();
        stack.pop_back();
        const auto& node = tree.nodes.at(id);
        if (node.inputs.empty()) {
            ++verdict.leaves;
            verdict.max_depth = std::max(verdict.max_depth, depth);
            verdict.max_ambiguity = std::max<std::size_t>(verdict.max_ambiguity, node.messages.size());
            if (node.messages.size() > 1) fail("leaf at depth " + std::to_string(depth) + " holds " +
                                               std::to_string(node.messages.size()) + " messages");
            continue;
        }
        if (node.inputs.size() != node.messages.size()) {
            fail("assignment does not cover the live messages");
            continue;
        }
        for (std::size_t sn = 0; sn < ch.num_states(); ++sn) {
            for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
                std::vector<std::uint64_t> compatible;
                for (std::size_t k = 0; k < node.messages.size(); ++k)
                    if (sup.contains(node.state, sn, y, node.inputs[k])) compatible.push_back(node.messages[k]);
                if (compatible.empty()) continue;
                auto it = std::find_if(node.children.begin(), node.children.end(), [&](const CodeTreeBranch& b) {
                    return b.output == y && b.next_state == sn;
                });
                if (it == node.children.end()) {
                    fail("missing branch for a consistent observation");
                    verdict.max_ambiguity = std::max(verdict.max_ambiguity, compatible.size());
                    continue;
                }
                const auto& child = tree.nodes.at(it->child);
                if (child.messages != compatible || child.state != sn) {
                    fail("child live set disagrees with the assignment");
                }
                stack.push_back({it->child, depth + 1});
            }
        }
    }
    verdict.pass = verdict.failure.empty();
    return verdict;
}

inline nlohmann::json to_json(const Channel& ch, const CodeTree& tree, std::size_t id = 0) {
    const auto& node = tree.nodes.at(id);
    nlohmann::json out;
    out["state"] = ch.states()[node.state];
    out["messages"] = node.messages;
    if (!node.inputs.empty()) {
        std::vector<std::string> sent;
        for (std::size_t x : node.inputs) sent.push_back(ch.inputs()[x]);
        out["inputs"] = sent;
        out["children"] = nlohmann::json::array();
        for (const auto& b : node.children) {
            out["children"].push_back({{"y", ch.outputs()[b.output]},
                                       {"s_next", ch.states()[b.next_state]},
                                       {"node", to_json(ch, tree, b.child)}});
        }
    }
    return out;
}

} // namespace zecap
