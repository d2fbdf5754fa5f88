#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stats.hpp"
#include "version.hpp"

namespace etm {

inline std::string format_double(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// Resolved run configuration, embedded in every output file so runs can be
// reproduced from the artifact alone.
struct KeyValueList {
    std::vector<std::pair<std::string, std::string>> items;

    void add(const std::string& key, const std::string& value) { items.emplace_back(key, value); }
    void add(const std::string& key, const char* value) { items.emplace_back(key, value); }
    void add(const std::string& key, double value) { items.emplace_back(key, format_double(value)); }
    void add(const std::string& key, std::int64_t value) {
        items.emplace_back(key, std::to_string(value));
    }
    void add(const std::string& key, std::uint64_t value) {
        items.emplace_back(key, std::to_string(value));
    }
    void add(const std::string& key, int value) { items.emplace_back(key, std::to_string(value)); }

    std::string canonical() const {
        std::string s;
        for (const auto& [k, val] : items) {
            s += k;
            s += "=";
            s += val;
            s += "\n";
        }
        return s;
    }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// "# key = value" comment lines ahead of the CSV header row.
inline void write_config_comments(std::ostream& os, const KeyValueList& kv) {
    os << "# schema = " << output_schema_version << "\n";
    os << "# version = " << version_string << "\n";
    for (const auto& [k, v] : kv.items) os << "# " << k << " = " << v << "\n";
    os << "# config_hash = " << fnv1a64(kv.canonical()) << "\n";
}

inline nlohmann::json to_json(const VerdictCheck& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["predicted"] = c.predicted;
    j["estimated"] = c.estimated;
    j["uncertainty"] = c.uncertainty;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    j["hard"] = c.hard;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline nlohmann::json to_json(const TheoremVerdict& v) {
    nlohmann::json j;
    j["schema"] = output_schema_version;
    j["version"] = version_string;
    j["id"] = v.id;
    j["title"] = v.title;
    j["pass"] = v.pass;
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [k, val] : v.inputs) inputs[k] = val;
    j["inputs"] = inputs;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : v.checks) j["checks"].push_back(to_json(c));
    return j;
}

inline void print_verdict_table(std::ostream& os, const TheoremVerdict& v) {
    os << (v.pass ? "[PASS] " : "[FAIL] ") << v.id << " - " << v.title << "\n";
    for (const auto& c : v.checks) {
        os << "    " << (c.hard ? (c.pass ? "ok   " : "FAIL ") : "info ") << c.name
           << ": estimated=" << format_double(c.estimated);
        if (c.predicted != 0.0 || c.tolerance != 0.0) {
            os << " predicted=" << format_double(c.predicted);
        }
        if (c.uncertainty > 0.0) os << " se=" << format_double(c.uncertainty);
        if (c.tolerance > 0.0) os << " tol=" << format_double(c.tolerance);
        if (!c.note.empty()) os << " (" << c.note << ")";
        os << "\n";
    }
}

}  // namespace etm
