#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include "zecap/bellman.hpp"
#include "zecap/channel.hpp"
#include "zecap/channel_io.hpp"
#include "zecap/code_oracle.hpp"
#include "zecap/corpus.hpp"
#include "zecap/positivity.hpp"
#include "zecap/value_iteration.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

namespace zecap::cli {

enum ExitCode : int {
    ok = 0,
    usage_or_file_error = 1,
    capacity_zero = 2,
    bellman_fail = 3,
    not_converged = 4,
};

struct RunConfig {
    std::string subcommand;
    std::string channel_path;
    std::size_t iters = 200;
    double tol = 1e-3;
    bool early_stop = false;
    std::size_t horizon = 4;
    std::string trace_path;
    std::string dump_lp_path;
    std::size_t w_table = 0;
    unsigned threads = 0;
    std::string candidate_path;
    double bellman_tol = 1e-9;
    std::optional<std::string> tree_state;
    std::string corpus_action;
    std::string corpus_dir;
};

inline BellmanCandidate load_candidate(const Channel& ch, const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("candidate file: ") + e.what());
    }
    if (!doc.contains("g") || !doc["g"].is_object() || !doc.contains("rho") || !doc["rho"].is_number()) {
        throw ParseError("candidate file: expected {\"g\": {state: value}, \"rho\": value}");
    }
    BellmanCandidate cand;
    cand.gain = doc["rho"].get<double>();
    cand.bias.assign(ch.num_states(), 0.0);
    std::vector<bool> seen(ch.num_states(), false);
    for (const auto& [name, value] : doc["g"].items()) {
        auto s = ch.state_index(name);
        if (!s) throw ParseError("candidate file: unknown state '" + name + "'");
        if (!value.is_number()) throw ParseError("candidate file: g['" + name + "'] is not a number");
        cand.bias[*s] = value.get<double>();
        seen[*s] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw ParseError("candidate file: g must give a value for every state");
    }
    return cand;
}

namespace detail {

inline void print_row(std::ostream& out, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << row[i];
}

inline void print_policy(std::ostream& out, const Channel& ch, const PolicyTable& policy) {
    for (std::size_t s = 0; s < ch.num_states(); ++s) {
        out << "  " << ch.states()[s] << ": ";
        print_row(out, policy.rows[s].weights);
        out << '\n';
    }
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    const auto ch = load_channel(cfg.channel_path);
    std::size_t positive = 0;
    for (std::size_t s = 0; s < ch.num_states(); ++s) positive += is_positive_state(ch, s) ? 1 : 0;
    out << "valid: true\n"
        << "states: " << ch.num_states() << '\n'
        << "inputs: " << ch.num_inputs() << '\n'
        << "outputs: " << ch.num_outputs() << '\n'
        << "support_only: " << (ch.support_only() ? "true" : "false") << '\n'
        << "positive_states: " << positive << '\n';
    return ok;
}

inline void print_positivity(std::ostream& out, const Channel& ch, const PositivityResult& r) {
    out << "decision: " << to_string(r.decision) << '\n' << "horizon: " << r.horizon() << '\n' << "V:\n";
    for (std::size_t n = 0; n < r.v_table.size(); ++n) {
        out << "  " << n << ":";
        for (int v : r.v_table[n]) out << ' ' << v;
        out << '\n';
    }
    out << "zero_sets:\n";
    for (std::size_t n = 0; n < r.zero_sets.size(); ++n) {
        out << "  " << n << ": [";
        for (std::size_t i = 0; i < r.zero_sets[n].size(); ++i) out << (i ? ", " : "") << ch.states()[r.zero_sets[n][i]];
        out << "]\n";
    }
    if (r.decision == Decision::capacity_positive) {
        out << "leader_witness:\n";
        for (std::size_t s = 0; s < ch.num_states(); ++s)
            out << "  " << ch.states()[s] << ": " << ch.inputs()[r.leader_inputs[s]] << '\n';
        return;
    }
    out << "stable_horizon: " << *r.stable_horizon << '\n' << "follower_witness:\n";
    for (std::size_t s = 0; s < ch.num_states(); ++s) {
        for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
            out << "  " << ch.states()[s] << ", " << ch.inputs()[x] << ": ";
            if (r.follower[s][x])
                out << ch.states()[*r.follower[s][x]] << '\n';
            else
                out << "undefined\n";
        }
    }
}

inline int cmd_positivity(const RunConfig& cfg, std::ostream& out) {
    const auto ch = load_channel(cfg.channel_path);
    const auto r = decide_positivity(ch);
    print_positivity(out, ch, r);
    return r.decision == Decision::capacity_positive ? ok : capacity_zero;
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ZECAP_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

inline int cmd_capacity(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto ch = load_channel(cfg.channel_path);
    const auto started = std::chrono::steady_clock::now();
    ValueIterationOptions opt;
    opt.max_iters = cfg.iters;
    opt.gap_tol = cfg.tol;
    opt.stop_when_converged = cfg.early_stop;
    opt.threads = resolve_threads(cfg.threads);
    const auto run = run_value_iteration(ch, opt);
    const auto& est = run.estimate;

    out << "positivity: " << to_string(run.positivity.decision) << '\n'
        << "iterations: " << est.iterations << '\n'
        << "converged: " << (run.converged ? "true" : "false") << '\n'
        << "lower: " << est.lower << '\n'
        << "upper: " << est.upper << '\n'
        << "point_estimate: " << est.point_estimate << '\n'
        << "gain_lo: " << est.gain_lo << '\n'
        << "gain_hi: " << est.gain_hi << '\n'
        << "policy:\n";
    print_policy(out, ch, est.policies.back());

    if (cfg.w_table > 0) {
        const auto table = w_table(ch, cfg.w_table);
        out << "w_table:\n";
        for (std::size_t n = 0; n < table.size(); ++n) {
            out << "  " << n << ": ";
            print_row(out, table[n]);
            out << '\n';
        }
    }
    if (!cfg.trace_path.empty()) {
        std::ofstream f(cfg.trace_path);
        if (!f) throw ParseError("cannot write '" + cfg.trace_path + "'");
        write_trace_csv(f, run.trace);
    }
    if (!cfg.dump_lp_path.empty()) {
        std::ofstream f(cfg.dump_lp_path);
        if (!f) throw ParseError("cannot write '" + cfg.dump_lp_path + "'");
        const auto& j = run.values[run.values.size() - 2].values;
        for (std::size_t s = 0; s < ch.num_states(); ++s) {
            f << "# state " << ch.states()[s] << ", iteration " << est.iterations << '\n';
            write_tableau(f, build_inner_lp(ch, s, j));
        }
    }
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    err << "elapsed_ms: " << ms << '\n';
    return run.converged ? ok : not_converged;
}

inline int cmd_bellman(const RunConfig& cfg, std::ostream& out) {
    const auto ch = load_channel(cfg.channel_path);
    const auto cand = load_candidate(ch, cfg.candidate_path);
    const auto report = verify_bellman(ch, cand, cfg.bellman_tol);
    out << "rho: " << cand.gain << '\n' << "residuals:\n";
    for (std::size_t s = 0; s < ch.num_states(); ++s)
        out << "  " << ch.states()[s] << ": " << report.residuals[s] << '\n';
    out << "max_abs_residual: " << report.max_abs_residual << '\n'
        << "gain_spread: " << report.gain_spread << '\n'
        << "tolerance: " << report.tolerance << '\n'
        << "verdict: " << (report.pass ? "pass" : "fail") << '\n';
    return report.pass ? ok : bellman_fail;
}

inline int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
    const auto ch = load_channel(cfg.channel_path);
    const auto table = exact_message_count(ch, cfg.horizon);
    out << "M:\n";
    for (std::size_t n = 0; n < table.size(); ++n) {
        out << "  " << n << ":";
        for (auto v : table[n]) out << ' ' << v;
        out << '\n';
    }
    if (!cfg.tree_state) return ok;

    auto s0 = ch.state_index(*cfg.tree_state);
    if (!s0) throw ParseError("unknown state '" + *cfg.tree_state + "'");
    if (decide_positivity(ch).decision == Decision::capacity_zero) {
        throw Error("code trees need a channel with positive capacity");
    }
    ValueIterationOptions opt;
    opt.max_iters = std::max<std::size_t>(cfg.horizon, 1);
    opt.stop_when_converged = false;
    const auto run = run_value_iteration(ch, opt);
    const auto tree = build_code_tree(ch, *s0, cfg.horizon, run);
    const auto verdict = verify_code_tree(ch, tree);
    out << "tree_messages: " << tree.message_count << '\n'
        << "tree_verdict: " << (verdict.pass ? "pass" : "fail") << '\n'
        << "tree_max_depth: " << verdict.max_depth << '\n'
        << "tree_max_ambiguity: " << verdict.max_ambiguity << '\n'
        << "tree: " << to_json(ch, tree).dump() << '\n';
    return verdict.pass ? ok : usage_or_file_error;
}

inline int cmd_dmc(const RunConfig& cfg, std::ostream& out) {
    const auto ch = load_channel(cfg.channel_path);
    const auto view = as_dmc(ch);
    const auto decision = decide_positivity(ch).decision;
    out << "inputs: " << view.num_inputs << '\n'
        << "positivity: " << to_string(decision) << '\n'
        << "capacity: " << dmc_capacity(ch) << '\n';
    return ok;
}

inline int cmd_corpus(const RunConfig& cfg, std::ostream& out) {
    if (cfg.corpus_action == "export") {
        if (cfg.corpus_dir.empty()) throw ParseError("corpus export needs a directory");
        for (const auto& p : export_corpus(cfg.corpus_dir)) out << p.string() << '\n';
        return ok;
    }
    for (const auto& e : load_corpus()) {
        out << e.name << ": " << e.description;
        if (e.expected_capacity) out << " (capacity " << *e.expected_capacity << ")";
        out << '\n';
    }
    return ok;
}

} // namespace detail

/// Runs the tool on `args` (without the program name). Never throws.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Zero-error feedback capacity of finite state channels", "zecap"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* validate_cmd = app.add_subcommand("validate", "check a channel file");
    validate_cmd->add_option("channel", cfg.channel_path, "channel file")->required();

    auto* positivity_cmd = app.add_subcommand("positivity", "decide whether the capacity is positive");
    positivity_cmd->add_option("channel", cfg.channel_path, "channel file")->required();

    auto* capacity_cmd = app.add_subcommand("capacity", "value iteration with capacity bounds");
    capacity_cmd->add_option("channel", cfg.channel_path, "channel file")->required();
    capacity_cmd->add_option("--iters", cfg.iters, "maximum iterations")->check(CLI::PositiveNumber);
    capacity_cmd->add_option("--tol", cfg.tol, "gain interval tolerance")->check(CLI::PositiveNumber);
    capacity_cmd->add_flag("--early-stop", cfg.early_stop, "stop once the gain interval is within --tol");
    capacity_cmd->add_option("--trace", cfg.trace_path, "write the bounds trace as CSV");
    capacity_cmd->add_option("--w-table", cfg.w_table, "print W(n,s) for n = 0..N");
    capacity_cmd->add_option("--dump-lp", cfg.dump_lp_path, "write the final inner LPs as tableaux");
    capacity_cmd->add_option("--threads", cfg.threads, "worker threads (default: ZECAP_THREADS or 1)");

    auto* bellman_cmd = app.add_subcommand("bellman", "verify a Bellman candidate");
    bellman_cmd->add_option("channel", cfg.channel_path, "channel file")->required();
    bellman_cmd->add_option("--candidate", cfg.candidate_path, "candidate {g, rho} file")->required();
    bellman_cmd->add_option("--tol", cfg.bellman_tol, "residual tolerance")->check(CLI::PositiveNumber);

    auto* oracle_cmd = app.add_subcommand("oracle", "exact message counts and code trees");
    oracle_cmd->add_option("channel", cfg.channel_path, "channel file")->required();
    oracle_cmd->add_option("--horizon", cfg.horizon, "number of channel uses")->required();
    oracle_cmd->add_option("--tree", cfg.tree_state, "build and verify a code tree from this state");

    auto* dmc_cmd = app.add_subcommand("dmc", "capacity of a single-state channel");
    dmc_cmd->add_option("channel", cfg.channel_path, "channel file")->required();

    auto* corpus_cmd = app.add_subcommand("corpus", "list or export the built-in channels");
    corpus_cmd->add_option("action", cfg.corpus_action, "list | export")
        ->check(CLI::IsMember({"list", "export"}))
        ->required();
    corpus_cmd->add_option("dir", cfg.corpus_dir, "export directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_or_file_error;
    }

    const auto precision = out.precision(12);
    int code = usage_or_file_error;
    try {
        if (*validate_cmd) code = detail::cmd_validate(cfg, out);
        else if (*positivity_cmd) code = detail::cmd_positivity(cfg, out);
        else if (*capacity_cmd) code = detail::cmd_capacity(cfg, out, err);
        else if (*bellman_cmd) code = detail::cmd_bellman(cfg, out);
        else if (*oracle_cmd) code = detail::cmd_oracle(cfg, out);
        else if (*dmc_cmd) code = detail::cmd_dmc(cfg, out);
        else if (*corpus_cmd) code = detail::cmd_corpus(cfg, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        code = usage_or_file_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        code = usage_or_file_error;
    }
    out.precision(precision);
    return code;
}

} // namespace zecap::cli
