#pragma once

// Built-in channels with known zero-error feedback capacities.

#include "zecap/bellman.hpp"
#include "zecap/channel.hpp"
#include "zecap/channel_io.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace zecap {

/// Where an expected value comes from.
enum class Origin {
    published, ///< printed with the original worked example
    derived,   ///< computed independently (closed form, brute force)
    trivial,   ///< forced by the channel structure
};

inline const char* to_string(Origin o) {
    switch (o) {
    case Origin::published: return "published";
    case Origin::derived: return "derived";
    case Origin::trivial: return "trivial";
    }
    return "unknown";
}

struct CorpusNote {
    std::string text;
    Origin origin;
};

struct CorpusEntry {
    std::string name;
    std::string description;
    RawChannel channel;
    std::optional<double> expected_capacity;
    /// expected_w[s][n-1] = W(n, s) for the first few n.
    std::vector<std::vector<double>> expected_w;
    std::optional<BellmanCandidate> bellman;
    std::vector<CorpusNote> notes;
};

namespace corpus {

inline RawTransition edge(const std::string& s, const std::string& x, const std::string& y,
                          const std::string& s_next, double p) {
    return {s, x, y, s_next, p};
}

inline std::vector<std::string> labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

/// Two states: 0 is a noisy BSC that always moves to 1; 1 is noiseless and
/// moves to 0 with probability p, stays with 1 - p.
inline RawChannel example1(double p = 0.5, double crossover = 0.25) {
    RawChannel ch{labels(2), labels(2), labels(2), {}};
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            const auto xs = std::to_string(x), ys = std::to_string(y);
            ch.transitions.push_back(edge("0", xs, ys, "1", x == y ? 1.0 - crossover : crossover));
        }
        const auto xs = std::to_string(x);
        ch.transitions.push_back(edge("1", xs, xs, "0", p));
        ch.transitions.push_back(edge("1", xs, xs, "1", 1.0 - p));
    }
    return ch;
}

/// Two states, next state = output. State 0 is a Z-channel (input 0 flips
/// to 1 with probability 1 - p), state 1 is noiseless.
inline RawChannel example2(double p = 0.5) {
    RawChannel ch{labels(2), labels(2), labels(2), {}};
    ch.transitions = {
        edge("0", "0", "0", "0", p),   edge("0", "0", "1", "1", 1.0 - p), edge("0", "1", "1", "1", 1.0),
        edge("1", "0", "0", "0", 1.0), edge("1", "1", "1", "1", 1.0),
    };
    return ch;
}

/// Three states, ternary alphabets. State 0 is noiseless and moves to the
/// state named by the input; in state 1 inputs 0 and 1 merge (to state 2)
/// while input 2 is distinct (to state 0); state 2 is useless and returns to 0.
inline RawChannel example3_reconstructed() {
    RawChannel ch{labels(3), labels(3), labels(3), {}};
    for (int x = 0; x < 3; ++x) {
        const auto xs = std::to_string(x);
        ch.transitions.push_back(edge("0", xs, xs, xs, 1.0));
        ch.transitions.push_back(x < 2 ? edge("1", xs, "0", "2", 1.0) : edge("1", xs, "1", "0", 1.0));
        ch.transitions.push_back(edge("2", xs, "0", "0", 1.0));
    }
    return ch;
}

/// Single-state channel with G(y) = {y, y+1 mod 5}.
inline RawChannel pentagon() {
    RawChannel ch{{"0"}, labels(5), labels(5), {}};
    for (int x = 0; x < 5; ++x) {
        ch.transitions.push_back(edge("0", std::to_string(x), std::to_string(x), "0", 0.5));
        ch.transitions.push_back(edge("0", std::to_string(x), std::to_string((x + 4) % 5), "0", 0.5));
    }
    return ch;
}

inline RawChannel identity_dmc(std::size_t k) {
    RawChannel ch{{"0"}, labels(k), labels(k), {}};
    for (std::size_t x = 0; x < k; ++x)
        ch.transitions.push_back(edge("0", std::to_string(x), std::to_string(x), "0", 1.0));
    return ch;
}

/// Binary symmetric channel with positive crossover: every input pair is adjacent.
inline RawChannel all_adjacent_dmc(double crossover = 0.1) {
    RawChannel ch{{"0"}, labels(2), labels(2), {}};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            ch.transitions.push_back(edge("0", std::to_string(x), std::to_string(y), "0",
                                          x == y ? 1.0 - crossover : crossover));
    return ch;
}

/// Drops probabilities, keeping only the support.
inline RawChannel support_only(RawChannel ch) {
    for (auto& t : ch.transitions) t.probability.reset();
    return ch;
}

/// Bias and gain solving the Bellman equation of example3_reconstructed.
inline BellmanCandidate example3_bellman() {
    const auto root = solve_example3_gain();
    const double rho = root.rho;
    // With J(0) = 0: J(2) = -rho and J(1) = log2(1 + 2^-rho) - rho.
    const double j1 = std::log2(1.0 + std::exp2(-rho)) - rho;
    return normalized({{0.0, j1, -rho}, rho});
}

} // namespace corpus

inline std::vector<CorpusEntry> load_corpus() {
    const double log_phi = std::log2((1.0 + std::sqrt(5.0)) / 2.0);
    std::vector<CorpusEntry> entries;

    {
        CorpusEntry e{"example1", "noisy state forced to a noiseless state; noiseless state returns w.p. p",
                      corpus::example1(), 0.5, {}, BellmanCandidate{{0.0, 0.5}, 0.5}, {}};
        for (int s = 0; s < 2; ++s) {
            std::vector<double> row;
            for (int n = 1; n <= 6; ++n) row.push_back(std::exp2(s == 0 ? n / 2 : (n + 1) / 2));
            e.expected_w.push_back(row);
        }
        e.notes = {{"capacity 1/2", Origin::published},
                   {"W(n,0) = 2^floor(n/2), W(n,1) = 2^ceil(n/2)", Origin::published},
                   {"bias (0, 1/2) with gain 1/2", Origin::published}};
        entries.push_back(std::move(e));
    }
    {
        CorpusEntry e{"example2", "Z-channel state and noiseless state, next state equals the output",
                      corpus::example2(), log_phi, {{1, 2, 3, 5, 8}, {2, 3, 5, 8, 13}},
                      BellmanCandidate{{0.0, log_phi}, log_phi}, {}};
        e.notes = {{"capacity log2 of the golden ratio", Origin::published},
                   {"W table is Fibonacci", Origin::published},
                   {"bias (0, log2 phi) from J(1) = J(0) + rho", Origin::derived}};
        entries.push_back(std::move(e));
    }
    {
        CorpusEntry e{"example3_reconstructed",
                      "three states with 3, 1 and 0 zero-error bits; topology rebuilt from its Bellman system",
                      corpus::example3_reconstructed(), corpus::example3_bellman().gain, {},
                      corpus::example3_bellman(), {}};
        e.notes = {{"capacity 1.102926 = log2((1-a1)/a1) with a1 = (1-a1)^3", Origin::published},
                   {"stationary policy rows (0.4656, 0.3177, 0.2167), (0, 0.3177, 0.6823), (0, 0, 1)",
                    Origin::published},
                   {"topology reconstructed to reproduce the Bellman system and policy zeros", Origin::derived}};
        entries.push_back(std::move(e));
    }
    {
        CorpusEntry e{"pentagon", "five-input DMC where each input shares one output with each neighbour",
                      corpus::pentagon(), std::log2(2.5), {{2.5, 6.25, 15.625}}, std::nullopt, {}};
        e.notes = {{"capacity log2(5/2): uniform input, two inputs per output", Origin::derived}};
        entries.push_back(std::move(e));
    }
    for (std::size_t k : {2u, 3u}) {
        CorpusEntry e{"identity_dmc_" + std::to_string(k), "noiseless " + std::to_string(k) + "-ary channel",
                      corpus::identity_dmc(k), std::log2(double(k)), {}, BellmanCandidate{{0.0}, std::log2(double(k))},
                      {{"capacity log2 k", Origin::trivial}}};
        entries.push_back(std::move(e));
    }
    {
        CorpusEntry e{"all_adjacent_dmc", "binary symmetric channel; both inputs reach both outputs",
                      corpus::all_adjacent_dmc(), 0.0, {{1, 1, 1}}, BellmanCandidate{{0.0}, 0.0},
                      {{"capacity 0: every input pair is adjacent", Origin::trivial}}};
        entries.push_back(std::move(e));
    }
    return entries;
}

inline std::optional<CorpusEntry> find_corpus_entry(const std::string& name) {
    for (auto& e : load_corpus())
        if (e.name == name) return e;
    return std::nullopt;
}

/// Writes every corpus channel as `<dir>/<name>.json`; returns the paths written.
inline std::vector<std::filesystem::path> export_corpus(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& e : load_corpus()) {
        auto path = dir / (e.name + ".json");
        save_channel(path, e.channel);
        written.push_back(std::move(path));
    }
    return written;
}

} // namespace zecap
