#pragma once

// Flow specification files (a flat TOML subset or JSON), CSV output with
// round-trip float formatting, and run manifests.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "ssflow/continued_fraction.hpp"
#include "ssflow/errors.hpp"
#include "ssflow/flow.hpp"

namespace ssflow {

inline constexpr const char* kVersion = "1.0.0";

enum class FlowFormat { toml, json };

namespace detail {

struct RawFlowDocument {
    std::optional<std::vector<double>> weights;
    std::optional<std::vector<double>> ratios;
    std::optional<std::string> name;
    std::optional<std::string> alpha;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

inline double parse_number(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last)
        throw ValidationError(field, "expected a number, got '" + t + "'");
    return v;
}

inline std::string parse_string(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '"' || t.back() != '"') throw ValidationError(field, "expected a quoted string");
    return t.substr(1, t.size() - 2);
}

inline std::vector<double> parse_array(const std::string& text, const std::string& field) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw ValidationError(field, "expected an array [ ... ]");
    std::vector<double> out;
    std::string body = t.substr(1, t.size() - 2);
    std::stringstream ss(body);
    std::string item;
    std::size_t idx = 0;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) {
            if (ss.eof()) break;  // trailing comma
            throw ValidationError(field + "[" + std::to_string(idx) + "]", "empty array element");
        }
        out.push_back(parse_number(item, field + "[" + std::to_string(idx) + "]"));
        ++idx;
    }
    return out;
}

// Flat TOML: top-level `key = value` pairs; values are numbers, basic strings
// or (possibly multi-line) arrays of numbers. Tables are rejected.
inline RawFlowDocument parse_toml(const std::string& text) {
    RawFlowDocument doc;
    std::stringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string l = trim(strip_comment(line));
        if (l.empty()) continue;
        if (l.front() == '[') throw ValidationError("line " + std::to_string(lineno), "tables are not supported");
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw ValidationError("line " + std::to_string(lineno), "expected key = value");
        const std::string key = trim(l.substr(0, eq));
        std::string value = trim(l.substr(eq + 1));
        if (!value.empty() && value.front() == '[') {
            while (value.find(']') == std::string::npos && std::getline(in, line)) {
                ++lineno;
                value += ' ' + trim(strip_comment(line));
            }
        }
        if (key == "weights") {
            if (doc.weights) throw ValidationError("weights", "duplicate key");
            doc.weights = parse_array(value, "weights");
        } else if (key == "ratios") {
            if (doc.ratios) throw ValidationError("ratios", "duplicate key");
            doc.ratios = parse_array(value, "ratios");
        } else if (key == "name") {
            doc.name = parse_string(value, "name");
        } else if (key == "alpha") {
            doc.alpha = parse_string(value, "alpha");
        } else {
            throw ValidationError(key, "unknown key");
        }
    }
    return doc;
}

inline std::vector<double> json_numbers(const nlohmann::json& v, const std::string& field) {
    if (!v.is_array()) throw ValidationError(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ValidationError(field + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

inline RawFlowDocument parse_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("document", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("document", "expected a JSON object");
    RawFlowDocument doc;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "weights") {
            doc.weights = json_numbers(it.value(), "weights");
        } else if (key == "ratios") {
            doc.ratios = json_numbers(it.value(), "ratios");
        } else if (key == "name") {
            if (!it.value().is_string()) throw ValidationError("name", "expected a string");
            doc.name = it.value().get<std::string>();
        } else if (key == "alpha") {
            if (!it.value().is_string()) throw ValidationError("alpha", "expected a string");
            doc.alpha = it.value().get<std::string>();
        } else {
            throw ValidationError(key, "unknown key");
        }
    }
    return doc;
}

/// "golden", "sqrt(d)" or "literal".
inline std::optional<Irrational> parse_alpha_kind(const std::string& s) {
    if (s == "literal") return std::nullopt;
    if (s == "golden") return Irrational::golden();
    if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') {
        const std::string inner = s.substr(5, s.size() - 6);
        std::int64_t d = 0;
        const auto res = std::from_chars(inner.data(), inner.data() + inner.size(), d);
        if (res.ec != std::errc() || res.ptr != inner.data() + inner.size() || d <= 0)
            throw ValidationError("alpha", "bad sqrt(d) constant '" + s + "'");
        return Irrational::sqrt_of(d);
    }
    throw ValidationError("alpha", "unknown constant kind '" + s + "' (golden, sqrt(d), literal)");
}

inline FlowSpec build_flow(const RawFlowDocument& doc, const std::string& fallback_name) {
    if (doc.weights && doc.ratios) throw ValidationError("ratios", "`weights` and `ratios` are mutually exclusive");
    if (!doc.weights && !doc.ratios) throw ValidationError("weights", "document needs `weights` or `ratios`");
    const std::string name = doc.name.value_or(fallback_name);
    FlowSpec flow;
    if (doc.weights) {
        if (doc.weights->empty()) throw ValidationError("weights", "list is empty");
        flow = FlowSpec(*doc.weights, name);
    } else {
        if (doc.ratios->empty()) throw ValidationError("ratios", "list is empty");
        flow = FlowSpec::from_ratios(*doc.ratios, name);
    }
    if (doc.alpha) {
        if (flow.size() != 2) throw ValidationError("alpha", "a symbolic alpha needs exactly two weights");
        const double actual = flow.weight(1) / flow.weight(0);
        if (const auto hint = parse_alpha_kind(*doc.alpha)) {
            if (std::abs(hint->value() - actual) > 1e-12 * actual)
                throw ValidationError("alpha", "constant does not match w_2/w_1 = " + std::to_string(actual));
            flow = FlowSpec(flow.weights(), name, hint);
        }
    }
    return flow;
}

}  // namespace detail

inline FlowSpec load_flow_from_string(const std::string& text, FlowFormat format, const std::string& name = "flow") {
    const auto doc = format == FlowFormat::json ? detail::parse_json(text) : detail::parse_toml(text);
    return detail::build_flow(doc, name);
}

/// Reads a `.json` or TOML flow file.
inline FlowSpec load_flow(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("flow", "cannot read file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const FlowFormat fmt = path.extension() == ".json" ? FlowFormat::json : FlowFormat::toml;
    return load_flow_from_string(ss.str(), fmt, path.stem().string());
}

/// A built-in name (cantor, fibonacci, golden) or a path to a flow file.
inline FlowSpec resolve_flow(const std::string& ref) {
    if (auto f = flows::builtin(ref)) return *f;
    return load_flow(ref);
}

/// Shortest representation that parses back to the same double, or 17
/// significant digits when `full` is set.
inline std::string format_double(double v, bool full = false) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    std::to_chars_result res;
    if (full)
        res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    else
        res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header, bool full_digits = false)
        : path_(path), out_(path), full_(full_digits) {
        if (!out_) throw ResourceError("cannot open '" + path.string() + "' for writing");
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    std::string num(double v) const { return format_double(v, full_); }
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    bool full_;
};

class Manifest {
public:
    Manifest(std::string command, nlohmann::json parameters)
        : doc_({{"tool", "ssflow"}, {"version", kVersion}, {"command", std::move(command)},
                {"parameters", std::move(parameters)}, {"files", nlohmann::json::array()}}) {}

    void add_file(const std::filesystem::path& path, const std::string& description) {
        std::error_code ec;
        const auto size = std::filesystem::file_size(path, ec);
        doc_["files"].push_back({{"path", path.filename().string()},
                                 {"bytes", ec ? 0 : static_cast<std::uintmax_t>(size)},
                                 {"description", description}});
    }

    nlohmann::json& extra() { return doc_["results"]; }

    void write(const std::filesystem::path& dir) const {
        std::ofstream out(dir / "manifest.json");
        if (!out) throw ResourceError("cannot write manifest in '" + dir.string() + "'");
        out << doc_.dump(2) << '\n';
    }

private:
    nlohmann::json doc_;
};

/// Creates `dir` if needed and checks that a file can be created inside it.
inline void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("out", "cannot create output directory '" + dir.string() + "': " + ec.message());
    const auto probe = dir / ".write-probe";
    {
        std::ofstream out(probe);
        if (!out) throw ValidationError("out", "output directory '" + dir.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace ssflow
