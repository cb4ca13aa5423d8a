#pragma once

// Experiment config files: a flat sectioned key=value format.
//
//   # comment (also ';')
//   [potential]
//   a = 2.0
//   b = 1.0
//   c = -1.0
//
//   [nc]
//   variant = canonical            # or: complex
//   theta = 0, 0.01, 0.02          # one or more values, all >= 0
//   a_term = expanded-exact        # or: paper-literal
//   closed_form = quadrature-only  # or: completed-square, paper-literal
//   alt_excited_sign = false
//
//   [states]
//   n = 0..1                       # inclusive range, or a single integer
//   m = 0..4
//   branches = -,+                 # complex only; "-", "+", "-,+", or "both"
//
//   [outputs]
//   csv = spectra.csv
//   svg = levels.svg
//   report = report.txt
//
//   [oracle]
//   validate = true
//   points = 8000
//   r_min = 1e-4
//   r_max = 12
//   spacing = uniform              # or: log
//
// Only [potential] and one theta are required; everything else has defaults.
// Unknown sections or keys, duplicate keys, and malformed values are rejected
// with "<path>:<line>: <message>" diagnostics.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace ncspectra {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntRange {
    int lo = 0, hi = 0;  // inclusive
    bool contains(int v) const { return v >= lo && v <= hi; }
};

struct OutputSpec {
    std::optional<std::string> csv;
    std::optional<std::string> svg;
    std::optional<std::string> report;
};

struct ExperimentConfig {
    PotentialParams params;
    NCConfig nc;  // nc.theta is unused by sweeps; theta_values below drives them
    std::vector<double> theta_values;
    IntRange n_range{0, 0};
    IntRange m_range{0, 2};
    std::vector<SpinBranch> branches;  // complex only; defaults to {-, +}
    OutputSpec outputs;
    bool validate_oracle = false;
    GridSpec grid;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void config_fail(const std::string& path, int line, const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
}

inline double parse_double_strict(const std::string& path, int line, const std::string& key,
                                  const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty()) {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() + t.size() && errno == 0) return v;
    }
    config_fail(path, line, "malformed numeric literal for '" + key + "': '" + t + "'");
}

inline int parse_int_strict(const std::string& path, int line, const std::string& key,
                            const std::string& text) {
    const std::string t = trim(text);
    int v = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size())
        config_fail(path, line, "malformed integer literal for '" + key + "': '" + t + "'");
    return v;
}

inline bool parse_bool_strict(const std::string& path, int line, const std::string& key,
                              const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    config_fail(path, line, "expected true/false for '" + key + "': '" + t + "'");
}

inline std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline IntRange parse_range(const std::string& path, int line, const std::string& key,
                            const std::string& text) {
    const std::string t = trim(text);
    const size_t dots = t.find("..");
    IntRange r;
    if (dots == std::string::npos) {
        r.lo = r.hi = parse_int_strict(path, line, key, t);
    } else {
        r.lo = parse_int_strict(path, line, key, t.substr(0, dots));
        r.hi = parse_int_strict(path, line, key, t.substr(dots + 2));
    }
    if (r.lo > r.hi) config_fail(path, line, "empty range for '" + key + "': '" + t + "'");
    if (r.lo < 0) config_fail(path, line, "'" + key + "' must be ≥ 0");
    return r;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");

    ExperimentConfig cfg;
    bool saw_theta = false, saw_branches = false;

    std::string section;
    std::map<std::string, int> seen;  // "section/key" -> first line
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = detail::trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') detail::config_fail(path, line, "unterminated section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            static const char* known[] = {"potential", "nc", "states", "outputs", "oracle"};
            if (std::find_if(std::begin(known), std::end(known),
                             [&](const char* k) { return section == k; }) == std::end(known))
                detail::config_fail(path, line, "unknown section [" + section + "]");
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) detail::config_fail(path, line, "expected 'key = value'");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string val = detail::trim(s.substr(eq + 1));
        if (key.empty()) detail::config_fail(path, line, "empty key");
        if (section.empty()) detail::config_fail(path, line, "key '" + key + "' outside any section");

        const std::string qualified = section + "/" + key;
        auto [it, fresh] = seen.emplace(qualified, line);
        if (!fresh)
            detail::config_fail(path, line,
                                "duplicate key '" + key + "' (first set on line " +
                                    std::to_string(it->second) + ")");

        if (section == "potential") {
            if (key == "a")
                cfg.params.a = detail::parse_double_strict(path, line, key, val);
            else if (key == "b")
                cfg.params.b = detail::parse_double_strict(path, line, key, val);
            else if (key == "c")
                cfg.params.c = detail::parse_double_strict(path, line, key, val);
            else
                detail::config_fail(path, line, "unknown key '" + key + "' in [potential]");
        } else if (section == "nc") {
            if (key == "variant") {
                if (val == "canonical")
                    cfg.nc.variant = SpaceVariant::Canonical;
                else if (val == "complex")
                    cfg.nc.variant = SpaceVariant::Complex;
                else
                    detail::config_fail(path, line, "variant must be 'canonical' or 'complex'");
            } else if (key == "theta") {
                cfg.theta_values.clear();
                for (const auto& tok : detail::split_commas(val)) {
                    const double t = detail::parse_double_strict(path, line, key, tok);
                    if (t < 0.0) detail::config_fail(path, line, "theta must be ≥ 0");
                    cfg.theta_values.push_back(t);
                }
                saw_theta = true;
            } else if (key == "a_term") {
                if (val == "expanded-exact")
                    cfg.nc.a_term_mode = ATermMode::ExpandedExact;
                else if (val == "paper-literal")
                    cfg.nc.a_term_mode = ATermMode::PaperLiteral;
                else
                    detail::config_fail(path, line, "a_term must be 'expanded-exact' or 'paper-literal'");
            } else if (key == "closed_form") {
                if (val == "quadrature-only")
                    cfg.nc.closed_form_mode = ClosedFormMode::QuadratureOnly;
                else if (val == "completed-square")
                    cfg.nc.closed_form_mode = ClosedFormMode::CompletedSquare;
                else if (val == "paper-literal")
                    cfg.nc.closed_form_mode = ClosedFormMode::PaperLiteral;
                else
                    detail::config_fail(path, line,
                                        "closed_form must be 'quadrature-only', 'completed-square' or "
                                        "'paper-literal'");
            } else if (key == "alt_excited_sign") {
                cfg.nc.alt_excited_sign_variant = detail::parse_bool_strict(path, line, key, val);
            } else {
                detail::config_fail(path, line, "unknown key '" + key + "' in [nc]");
            }
        } else if (section == "states") {
            if (key == "n")
                cfg.n_range = detail::parse_range(path, line, key, val);
            else if (key == "m")
                cfg.m_range = detail::parse_range(path, line, key, val);
            else if (key == "branches") {
                cfg.branches.clear();
                if (val == "both") {
                    cfg.branches = {SpinBranch::Minus, SpinBranch::Plus};
                } else {
                    for (const auto& tok : detail::split_commas(val)) {
                        if (tok == "-")
                            cfg.branches.push_back(SpinBranch::Minus);
                        else if (tok == "+")
                            cfg.branches.push_back(SpinBranch::Plus);
                        else
                            detail::config_fail(path, line, "branches must list '-' and/or '+', or 'both'");
                    }
                }
                saw_branches = true;
            } else {
                detail::config_fail(path, line, "unknown key '" + key + "' in [states]");
            }
        } else if (section == "outputs") {
            if (val.empty()) detail::config_fail(path, line, "empty filename for '" + key + "'");
            if (key == "csv")
                cfg.outputs.csv = val;
            else if (key == "svg")
                cfg.outputs.svg = val;
            else if (key == "report")
                cfg.outputs.report = val;
            else
                detail::config_fail(path, line, "unknown key '" + key + "' in [outputs]");
        } else {  // oracle
            if (key == "validate")
                cfg.validate_oracle = detail::parse_bool_strict(path, line, key, val);
            else if (key == "points")
                cfg.grid.points = detail::parse_int_strict(path, line, key, val);
            else if (key == "r_min")
                cfg.grid.r_min = detail::parse_double_strict(path, line, key, val);
            else if (key == "r_max")
                cfg.grid.r_max = detail::parse_double_strict(path, line, key, val);
            else if (key == "spacing") {
                if (val == "uniform")
                    cfg.grid.spacing = GridSpec::Spacing::Uniform;
                else if (val == "log")
                    cfg.grid.spacing = GridSpec::Spacing::Log;
                else
                    detail::config_fail(path, line, "spacing must be 'uniform' or 'log'");
            } else {
                detail::config_fail(path, line, "unknown key '" + key + "' in [oracle]");
            }
        }
    }

    // Defaults and whole-config validation.
    if (!saw_theta) cfg.theta_values = {0.0};
    if (cfg.theta_values.empty()) throw ConfigError(path + ": theta list is empty");
    if (!saw_branches) cfg.branches = {SpinBranch::Minus, SpinBranch::Plus};
    if (!cfg.outputs.csv && !cfg.outputs.svg && !cfg.outputs.report) cfg.outputs.csv = "spectra.csv";

    auto rep = validate_params(cfg.params);
    auto nc_rep = validate_nc(cfg.nc);
    for (const auto& i : nc_rep.issues) rep.issues.push_back(i);
    if (!(cfg.grid.r_min > 0.0) || !(cfg.grid.r_max > cfg.grid.r_min))
        rep.issues.push_back({"grid", "grid needs 0 < r_min < r_max"});
    if (cfg.grid.points < 100) rep.issues.push_back({"grid", "grid needs at least 100 points"});
    if (!rep.ok()) throw ConfigError(path + ": " + rep.issues.front().message);
    return cfg;
}

/// Inverse of parse_config, for round-trip tests and `--validate` echoes.
inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[potential]\n"
        << "a = " << cfg.params.a << "\n"
        << "b = " << cfg.params.b << "\n"
        << "c = " << cfg.params.c << "\n\n";
    out << "[nc]\n"
        << "variant = " << to_string(cfg.nc.variant) << "\n"
        << "theta = ";
    for (size_t i = 0; i < cfg.theta_values.size(); ++i)
        out << (i ? ", " : "") << cfg.theta_values[i];
    out << "\n"
        << "a_term = " << to_string(cfg.nc.a_term_mode) << "\n"
        << "closed_form = " << to_string(cfg.nc.closed_form_mode) << "\n"
        << "alt_excited_sign = " << (cfg.nc.alt_excited_sign_variant ? "true" : "false") << "\n\n";
    out << "[states]\n"
        << "n = " << cfg.n_range.lo << ".." << cfg.n_range.hi << "\n"
        << "m = " << cfg.m_range.lo << ".." << cfg.m_range.hi << "\n"
        << "branches = ";
    for (size_t i = 0; i < cfg.branches.size(); ++i)
        out << (i ? "," : "") << to_string(cfg.branches[i]);
    out << "\n\n";
    out << "[outputs]\n";
    if (cfg.outputs.csv) out << "csv = " << *cfg.outputs.csv << "\n";
    if (cfg.outputs.svg) out << "svg = " << *cfg.outputs.svg << "\n";
    if (cfg.outputs.report) out << "report = " << *cfg.outputs.report << "\n";
    out << "\n[oracle]\n"
        << "validate = " << (cfg.validate_oracle ? "true" : "false") << "\n"
        << "points = " << cfg.grid.points << "\n"
        << "r_min = " << cfg.grid.r_min << "\n"
        << "r_max = " << cfg.grid.r_max << "\n"
        << "spacing = " << to_string(cfg.grid.spacing) << "\n";
    return out.str();
}

}  // namespace ncspectra
