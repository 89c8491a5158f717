#pragma once

// Finite state channel model: alphabets, the transition support
// G(y, s'|s), input adjacency and positive states.

#include "zecap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace zecap {

/// A transition entry as read from a channel file, identifiers not yet resolved.
struct RawTransition {
    std::string state;
    std::string input;
    std::string output;
    std::string next_state;
    std::optional<double> probability; ///< absent means support-only
};

struct RawChannel {
    std::vector<std::string> states;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<RawTransition> transitions;
};

enum class ViolationKind {
    empty_alphabet,
    duplicate_identifier,
    unknown_identifier,
    mixed_weights,
    non_positive_probability,
    duplicate_entry,
    missing_input_row,
    bad_probability_sum,
};

inline const char* to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::empty_alphabet: return "EmptyAlphabet";
    case ViolationKind::duplicate_identifier: return "DuplicateIdentifier";
    case ViolationKind::unknown_identifier: return "UnknownIdentifier";
    case ViolationKind::mixed_weights: return "MixedWeights";
    case ViolationKind::non_positive_probability: return "NonPositiveProbability";
    case ViolationKind::duplicate_entry: return "DuplicateEntry";
    case ViolationKind::missing_input_row: return "MissingInputRow";
    case ViolationKind::bad_probability_sum: return "BadProbabilitySum";
    }
    return "Unknown";
}

struct Violation {
    ViolationKind kind;
    std::string detail;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(summarize(violations)), violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

    bool has(ViolationKind kind) const {
        return std::any_of(violations_.begin(), violations_.end(),
                           [kind](const Violation& v) { return v.kind == kind; });
    }

private:
    static std::string summarize(const std::vector<Violation>& violations) {
        std::ostringstream os;
        os << "invalid channel (" << violations.size() << " violation"
           << (violations.size() == 1 ? "" : "s") << ")";
        for (const auto& v : violations) os << "\n  " << to_string(v.kind) << ": " << v.detail;
        return os.str();
    }

    std::vector<Violation> violations_;
};

/// Transition with identifiers resolved to dense indices.
struct Transition {
    std::size_t state;
    std::size_t input;
    std::size_t output;
    std::size_t next_state;
    std::optional<double> probability;
};

class Channel;

/**
 * Support structure of a channel.
 *
 * For every (s, s', y) holds G(y, s'|s), the sorted list of inputs that
 * produce output y and next state s' from state s with positive
 * probability. Also holds S(s, x), the next states reachable from s under
 * input x, and the union of those over x.
 */
class SupportIndex {
public:
    SupportIndex() = default;

    SupportIndex(std::size_t num_states, std::size_t num_inputs, std::size_t num_outputs,
                 std::span<const Transition> transitions)
        : num_states_(num_states), num_inputs_(num_inputs), num_outputs_(num_outputs),
          g_sets_(num_states * num_states * num_outputs),
          next_states_(num_states * num_inputs), reachable_(num_states) {
        for (const auto& t : transitions) {
            if (t.probability && !(*t.probability > 0.0)) continue;
            g_sets_[g_slot(t.state, t.next_state, t.output)].push_back(t.input);
            next_states_[t.state * num_inputs_ + t.input].push_back(t.next_state);
            reachable_[t.state].push_back(t.next_state);
        }
        for (auto* family : {&g_sets_, &next_states_, &reachable_}) {
            for (auto& v : *family) {
                std::sort(v.begin(), v.end());
                v.erase(std::unique(v.begin(), v.end()), v.end());
            }
        }
    }

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_inputs() const noexcept { return num_inputs_; }
    std::size_t num_outputs() const noexcept { return num_outputs_; }

    /// G(y, s'|s) as a sorted list of input indices.
    std::span<const std::size_t> g(std::size_t s, std::size_t s_next, std::size_t y) const {
        return g_sets_.at(g_slot(s, s_next, y));
    }

    bool contains(std::size_t s, std::size_t s_next, std::size_t y, std::size_t x) const {
        auto set = g(s, s_next, y);
        return std::binary_search(set.begin(), set.end(), x);
    }

    /// S(s, x): next states reachable from s when x is sent.
    std::span<const std::size_t> next_states(std::size_t s, std::size_t x) const {
        return next_states_.at(s * num_inputs_ + x);
    }

    std::span<const std::size_t> reachable(std::size_t s) const { return reachable_.at(s); }

    friend bool operator==(const SupportIndex&, const SupportIndex&) = default;

private:
    std::size_t g_slot(std::size_t s, std::size_t s_next, std::size_t y) const {
        return (s * num_states_ + s_next) * num_outputs_ + y;
    }

    std::size_t num_states_ = 0;
    std::size_t num_inputs_ = 0;
    std::size_t num_outputs_ = 0;
    std::vector<std::vector<std::size_t>> g_sets_;
    std::vector<std::vector<std::size_t>> next_states_;
    std::vector<std::vector<std::size_t>> reachable_;
};

/// A validated finite state channel. Immutable; only `validate` constructs one.
class Channel {
public:
    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::vector<std::string>& inputs() const noexcept { return inputs_; }
    const std::vector<std::string>& outputs() const noexcept { return outputs_; }
    const std::vector<Transition>& transitions() const noexcept { return transitions_; }

    std::size_t num_states() const noexcept { return states_.size(); }
    std::size_t num_inputs() const noexcept { return inputs_.size(); }
    std::size_t num_outputs() const noexcept { return outputs_.size(); }

    bool support_only() const noexcept { return support_only_; }

    const SupportIndex& support() const noexcept { return support_; }

    std::optional<std::size_t> state_index(const std::string& name) const {
        return find(states_, name);
    }
    std::optional<std::size_t> input_index(const std::string& name) const {
        return find(inputs_, name);
    }

    /// Converts back to the file-level representation.
    RawChannel raw() const {
        RawChannel r{states_, inputs_, outputs_, {}};
        r.transitions.reserve(transitions_.size());
        for (const auto& t : transitions_) {
            r.transitions.push_back({states_[t.state], inputs_[t.input], outputs_[t.output],
                                     states_[t.next_state], t.probability});
        }
        return r;
    }

private:
    friend Channel validate(const RawChannel& raw);

    static std::optional<std::size_t> find(const std::vector<std::string>& names,
                                           const std::string& name) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
    }

    std::vector<std::string> states_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    std::vector<Transition> transitions_;
    bool support_only_ = true;
    SupportIndex support_;
};

namespace detail {

inline std::unordered_map<std::string, std::size_t>
index_alphabet(const char* what, const std::vector<std::string>& names,
               std::vector<Violation>& violations) {
    std::unordered_map<std::string, std::size_t> index;
    if (names.empty()) {
        violations.push_back({ViolationKind::empty_alphabet, std::string(what) + " alphabet is empty"});
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!index.emplace(names[i], i).second) {
            violations.push_back({ViolationKind::duplicate_identifier,
                                  std::string(what) + " '" + names[i] + "' listed twice"});
        }
    }
    return index;
}

} // namespace detail

/// Lists every invariant violation of `raw`; empty means the channel is valid.
inline std::vector<Violation> check(const RawChannel& raw) {
    std::vector<Violation> violations;
    const auto s_index = detail::index_alphabet("state", raw.states, violations);
    const auto x_index = detail::index_alphabet("input", raw.inputs, violations);
    const auto y_index = detail::index_alphabet("output", raw.outputs, violations);

    std::size_t weighted = 0;
    for (const auto& t : raw.transitions) weighted += t.probability.has_value() ? 1 : 0;
    if (weighted != 0 && weighted != raw.transitions.size()) {
        violations.push_back({ViolationKind::mixed_weights,
                              "some transitions carry probabilities and some do not"});
    }

    using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
    std::map<Key, std::size_t> seen;
    std::map<std::pair<std::size_t, std::size_t>, double> row_sum;
    std::map<std::pair<std::size_t, std::size_t>, bool> row_weighted;

    auto lookup = [&](const std::unordered_map<std::string, std::size_t>& index,
                      const std::string& name, const char* what) -> std::optional<std::size_t> {
        auto it = index.find(name);
        if (it == index.end()) {
            violations.push_back({ViolationKind::unknown_identifier,
                                  std::string("unknown ") + what + " '" + name + "'"});
            return std::nullopt;
        }
        return it->second;
    };

    for (const auto& t : raw.transitions) {
        auto s = lookup(s_index, t.state, "state");
        auto x = lookup(x_index, t.input, "input");
        auto y = lookup(y_index, t.output, "output");
        auto sn = lookup(s_index, t.next_state, "state");
        if (!s || !x || !y || !sn) continue;
        const std::string where = "(s=" + t.state + ", x=" + t.input + ", y=" + t.output +
                                  ", s'=" + t.next_state + ")";
        if (t.probability && !(*t.probability > 0.0 && std::isfinite(*t.probability))) {
            violations.push_back({ViolationKind::non_positive_probability,
                                  "probability must be positive and finite at " + where});
        }
        if (seen[{*s, *x, *y, *sn}]++ == 1) {
            violations.push_back({ViolationKind::duplicate_entry, "duplicate transition " + where});
        }
        row_sum[{*s, *x}] += t.probability.value_or(0.0);
        row_weighted[{*s, *x}] = row_weighted[{*s, *x}] || t.probability.has_value();
    }

    for (std::size_t s = 0; s < raw.states.size(); ++s) {
        for (std::size_t x = 0; x < raw.inputs.size(); ++x) {
            auto it = row_sum.find({s, x});
            if (it == row_sum.end()) {
                violations.push_back({ViolationKind::missing_input_row,
                                      "no transition for (s=" + raw.states[s] + ", x=" +
                                          raw.inputs[x] + ")"});
                continue;
            }
            if (row_weighted[{s, x}] && std::abs(it->second - 1.0) > 1e-9) {
                std::ostringstream os;
                os.precision(12);
                os << "probabilities for (s=" << raw.states[s] << ", x=" << raw.inputs[x]
                   << ") sum to " << it->second;
                violations.push_back({ViolationKind::bad_probability_sum, os.str()});
            }
        }
    }
    return violations;
}

/// Certifies the channel invariants and resolves identifiers; throws ValidationError.
inline Channel validate(const RawChannel& raw) {
    auto violations = check(raw);
    if (!violations.empty()) throw ValidationError(std::move(violations));

    Channel ch;
    ch.states_ = raw.states;
    ch.inputs_ = raw.inputs;
    ch.outputs_ = raw.outputs;
    ch.transitions_.reserve(raw.transitions.size());
    for (const auto& t : raw.transitions) {
        ch.transitions_.push_back({*ch.state_index(t.state), *ch.input_index(t.input),
                                   *Channel::find(ch.outputs_, t.output),
                                   *ch.state_index(t.next_state), t.probability});
        if (t.probability) ch.support_only_ = false;
    }
    ch.support_ = SupportIndex(ch.num_states(), ch.num_inputs(), ch.num_outputs(), ch.transitions_);
    return ch;
}

/// Builds the support index afresh from the transition list.
inline SupportIndex support_index(const Channel& ch) {
    return SupportIndex(ch.num_states(), ch.num_inputs(), ch.num_outputs(), ch.transitions());
}

/// True iff x1 and x2 can produce a common (y, s') from state s.
inline bool adjacent(const Channel& ch, std::size_t s, std::size_t x1, std::size_t x2) {
    if (x1 == x2) throw std::invalid_argument("adjacency needs two distinct inputs");
    const auto& sup = ch.support();
    for (std::size_t sn = 0; sn < ch.num_states(); ++sn) {
        for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
            if (sup.contains(s, sn, y, x1) && sup.contains(s, sn, y, x2)) return true;
        }
    }
    return false;
}

/// Lowest-index pair of inputs that are not adjacent at s, if any.
inline std::optional<std::pair<std::size_t, std::size_t>>
non_adjacent_pair(const Channel& ch, std::size_t s) {
    for (std::size_t a = 0; a < ch.num_inputs(); ++a) {
        for (std::size_t b = a + 1; b < ch.num_inputs(); ++b) {
            if (!adjacent(ch, s, a, b)) return std::pair{a, b};
        }
    }
    return std::nullopt;
}

inline bool is_positive_state(const Channel& ch, std::size_t s) {
    return non_adjacent_pair(ch, s).has_value();
}

/// Single-state channel seen as a DMC: G(y) = G(y, s|s).
struct DmcView {
    std::size_t num_inputs = 0;
    std::vector<std::vector<std::size_t>> g; ///< indexed by output
};

inline DmcView as_dmc(const Channel& ch) {
    if (ch.num_states() != 1) throw NotSingleStateError();
    DmcView view{ch.num_inputs(), {}};
    for (std::size_t y = 0; y < ch.num_outputs(); ++y) {
        auto set = ch.support().g(0, 0, y);
        view.g.emplace_back(set.begin(), set.end());
    }
    return view;
}

} // namespace zecap
