#pragma once

// JSON channel files:
//   { "states": [...], "inputs": [...], "outputs": [...],
//     "transitions": [ {"s": .., "x": .., "y": .., "s_next": .., "p": ..}, ... ] }
// `p` is omitted throughout for support-only channels.

#include "zecap/channel.hpp"
#include "zecap/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace zecap {

namespace detail {

inline std::vector<std::string> string_array(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_array()) {
        throw ParseError(std::string("channel file: '") + key + "' must be an array of strings");
    }
    std::vector<std::string> out;
    for (const auto& v : doc[key]) {
        if (!v.is_string()) throw ParseError(std::string("channel file: '") + key + "' holds a non-string");
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline std::string string_field(const nlohmann::json& entry, const char* key) {
    if (!entry.contains(key) || !entry[key].is_string()) {
        throw ParseError(std::string("channel file: transition field '") + key + "' must be a string");
    }
    return entry[key].get<std::string>();
}

} // namespace detail

inline RawChannel raw_channel_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError("channel file: top level must be an object");
    RawChannel raw;
    raw.states = detail::string_array(doc, "states");
    raw.inputs = detail::string_array(doc, "inputs");
    raw.outputs = detail::string_array(doc, "outputs");
    if (!doc.contains("transitions") || !doc["transitions"].is_array()) {
        throw ParseError("channel file: 'transitions' must be an array");
    }
    for (const auto& e : doc["transitions"]) {
        if (!e.is_object()) throw ParseError("channel file: transition entries must be objects");
        RawTransition t{detail::string_field(e, "s"), detail::string_field(e, "x"),
                        detail::string_field(e, "y"), detail::string_field(e, "s_next"),
                        std::nullopt};
        if (e.contains("p")) {
            if (!e["p"].is_number()) throw ParseError("channel file: 'p' must be a number");
            t.probability = e["p"].get<double>();
        }
        raw.transitions.push_back(std::move(t));
    }
    return raw;
}

inline RawChannel parse_raw_channel(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("channel file: ") + e.what());
    }
    return raw_channel_from_json(doc);
}

inline nlohmann::json to_json(const RawChannel& raw) {
    nlohmann::json doc;
    doc["states"] = raw.states;
    doc["inputs"] = raw.inputs;
    doc["outputs"] = raw.outputs;
    doc["transitions"] = nlohmann::json::array();
    for (const auto& t : raw.transitions) {
        nlohmann::json e{{"s", t.state}, {"x", t.input}, {"y", t.output}, {"s_next", t.next_state}};
        if (t.probability) e["p"] = *t.probability;
        doc["transitions"].push_back(std::move(e));
    }
    return doc;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Channel load_channel(const std::filesystem::path& path) {
    return validate(parse_raw_channel(read_text_file(path)));
}

inline void save_channel(const std::filesystem::path& path, const RawChannel& raw) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << to_json(raw).dump(2) << '\n';
}

} // namespace zecap
