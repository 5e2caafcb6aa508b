#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geosep/error.hpp"
#include "geosep/eval.hpp"
#include "geosep/separation.hpp"

namespace geosep {

/// Everything a CLI run needs. Persisted as flat `key = value` lines.
struct RunConfig {
    // shared
    std::string out = "out";
    std::uint64_t seed = 42;
    unsigned threads = 0; ///< 0: library default
    // synth
    std::size_t size = 512;
    double noise_sigma = 0.05;
    // separate
    std::string input;
    SolverConfig solver;
    bool preprocess = true;
    // eval
    std::string truth_points;
    std::string truth_curves;
    std::string est_points;
    std::string est_curves;
    MeasureConfig measure;

    void validate() const {
        solver.validate();
        if (size < 8 || size % 2 != 0) throw ConfigError("size must be even and >= 8");
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("noise_sigma must be >= 0");
        if (solver.wavelets.levels < 1) throw ConfigError("levels must be >= 1");
        if (solver.shearlets.scales < 1) throw ConfigError("scales must be >= 1");
        if (solver.shearlets.fan_order < 1) throw ConfigError("fan_order must be >= 1");
        if (solver.subbands < 1) throw ConfigError("subbands must be >= 1");
        if (solver.weights.values.size() != static_cast<std::size_t>(solver.subbands) + 1) {
            throw ConfigError("weights needs " + std::to_string(solver.subbands + 1) + " entries for " +
                              std::to_string(solver.subbands) + " subbands, got " +
                              std::to_string(solver.weights.values.size()));
        }
        try {
            solver.weights.validate(solver.weights.values.size());
            measure.validate();
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

inline long long parse_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return x;
}

inline long long parse_nonnegative(const std::string& key, const std::string& v) {
    const long long x = parse_integer(key, v);
    if (x < 0) throw ConfigError(key + " must be >= 0");
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::string format_real(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

} // namespace detail

inline std::vector<double> parse_weights(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(detail::parse_real("weights", detail::trim(item)));
    if (out.empty()) throw ConfigError("weights: empty list");
    return out;
}

/// Applies one key; unknown keys raise ConfigError.
inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    auto& s = cfg.solver;
    auto optional_real = [&](std::optional<double>& slot) {
        if (value == "auto") slot.reset();
        else slot = parse_real(key, value);
    };
    if (key == "out") cfg.out = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_nonnegative(key, value));
    else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_nonnegative(key, value));
    else if (key == "size") cfg.size = static_cast<std::size_t>(parse_nonnegative(key, value));
    else if (key == "noise_sigma") cfg.noise_sigma = parse_real(key, value);
    else if (key == "input") cfg.input = value;
    else if (key == "iterations") s.iterations = static_cast<int>(parse_integer(key, value));
    else if (key == "lambda_max_factor") s.lambda_max_factor = parse_real(key, value);
    else if (key == "lambda_min") optional_real(s.lambda_min);
    else if (key == "rho") optional_real(s.rho);
    else if (key == "schedule") s.schedule = parse_schedule(value);
    else if (key == "thresholding") s.thresholding = parse_thresholding(value);
    else if (key == "levels") s.wavelets.levels = static_cast<int>(parse_integer(key, value));
    else if (key == "scales") s.shearlets.scales = static_cast<int>(parse_integer(key, value));
    else if (key == "fan_order") s.shearlets.fan_order = static_cast<int>(parse_integer(key, value));
    else if (key == "subbands") s.subbands = static_cast<int>(parse_integer(key, value));
    else if (key == "weights") s.weights.values = parse_weights(value);
    else if (key == "preprocess") cfg.preprocess = parse_bool(key, value);
    else if (key == "sigma_g") cfg.measure.gaussian_sigma = parse_real(key, value);
    else if (key == "truth_points") cfg.truth_points = value;
    else if (key == "truth_curves") cfg.truth_curves = value;
    else if (key == "est_points") cfg.est_points = value;
    else if (key == "est_curves") cfg.est_curves = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
inline void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin = "config") {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        try {
            set_config_value(cfg, key, detail::trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

inline void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    apply_config_text(cfg, text.str(), path.string());
}

/// Effective configuration in the same format load_config_file reads.
inline std::string format_config(const RunConfig& cfg) {
    using detail::format_real;
    const auto& s = cfg.solver;
    std::ostringstream o;
    o << "out = " << cfg.out << '\n';
    o << "seed = " << cfg.seed << '\n';
    o << "threads = " << cfg.threads << '\n';
    o << "size = " << cfg.size << '\n';
    o << "noise_sigma = " << format_real(cfg.noise_sigma) << '\n';
    o << "input = " << cfg.input << '\n';
    o << "iterations = " << s.iterations << '\n';
    o << "lambda_max_factor = " << format_real(s.lambda_max_factor) << '\n';
    o << "lambda_min = " << (s.lambda_min ? format_real(*s.lambda_min) : "auto") << '\n';
    o << "rho = " << (s.rho ? format_real(*s.rho) : "auto") << '\n';
    o << "schedule = " << to_string(s.schedule) << '\n';
    o << "thresholding = " << to_string(s.thresholding) << '\n';
    o << "levels = " << s.wavelets.levels << '\n';
    o << "scales = " << s.shearlets.scales << '\n';
    o << "fan_order = " << s.shearlets.fan_order << '\n';
    o << "subbands = " << s.subbands << '\n';
    o << "weights = ";
    for (std::size_t i = 0; i < s.weights.values.size(); ++i) o << (i ? "," : "") << format_real(s.weights.values[i]);
    o << '\n';
    o << "preprocess = " << (cfg.preprocess ? "true" : "false") << '\n';
    o << "sigma_g = " << format_real(cfg.measure.gaussian_sigma) << '\n';
    o << "truth_points = " << cfg.truth_points << '\n';
    o << "truth_curves = " << cfg.truth_curves << '\n';
    o << "est_points = " << cfg.est_points << '\n';
    o << "est_curves = " << cfg.est_curves << '\n';
    return o.str();
}

} // namespace geosep
