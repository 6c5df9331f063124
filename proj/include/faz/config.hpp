#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "faz/candidates.hpp"
#include "faz/canny.hpp"
#include "faz/error.hpp"
#include "faz/image.hpp"
#include "faz/region_grow.hpp"

namespace faz {

/// Every free parameter of the pipeline, serialized as flat key=value lines.
/// Unknown keys are errors so experiment configs stay auditable.
struct PipelineConfig {
    int tophat_se = 9;        // disc, vessel enhancement
    int closure_se = 5;       // disc, edge-map closure
    int opening_se = 7;       // disc, opening after inversion
    int seed_erosion_se = 5;  // disc, pre-grow seed erosion
    CannyParams canny;
    FilterRules filter;
    GrowParams grow;
    double size_mm = 3.0;

    void validate() const {
        auto odd = [](int v, const char* name) {
            if (v < 1 || v % 2 == 0)
                throw ConfigError(std::string(name) + " must be odd and >= 1");
        };
        odd(tophat_se, "tophat_se");
        odd(closure_se, "closure_se");
        odd(opening_se, "opening_se");
        odd(seed_erosion_se, "seed_erosion_se");
        canny.validate();
        filter.validate();
        grow.validate();
        if (!(size_mm > 0.0)) throw ConfigError("size_mm must be positive");
    }
};

namespace config_detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_real(std::string_view v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(std::string(v), &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + std::string(v) + "'");
    }
}

inline long long parse_int(std::string_view v, const std::string& key) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("bad integer value for " + key + ": '" + std::string(v) + "'");
    return out;
}

}  // namespace config_detail

/// Parses key=value text. Blank lines and '#' comments are allowed; unknown
/// or duplicate keys are errors.
inline PipelineConfig parse_config(const std::string& text) {
    using namespace config_detail;
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key(trim(s.substr(0, eq)));
        const std::string_view value = trim(s.substr(eq + 1));
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError("duplicate key: " + key);
        seen.push_back(key);

        if (key == "tophat_se")
            cfg.tophat_se = static_cast<int>(parse_int(value, key));
        else if (key == "closure_se")
            cfg.closure_se = static_cast<int>(parse_int(value, key));
        else if (key == "opening_se")
            cfg.opening_se = static_cast<int>(parse_int(value, key));
        else if (key == "seed_erosion_se")
            cfg.seed_erosion_se = static_cast<int>(parse_int(value, key));
        else if (key == "canny_sigma")
            cfg.canny.sigma = parse_real(value, key);
        else if (key == "canny_low_factor")
            cfg.canny.low_factor = parse_real(value, key);
        else if (key == "canny_high_factor")
            cfg.canny.high_factor = parse_real(value, key);
        else if (key == "border_margin_frac")
            cfg.filter.border_margin_frac = parse_real(value, key);
        else if (key == "min_solidity")
            cfg.filter.min_solidity = parse_real(value, key);
        else if (key == "min_area_px")
            cfg.filter.min_area_px = parse_int(value, key);
        else if (key == "grow_tolerance")
            cfg.grow.tolerance_frac = parse_real(value, key);
        else if (key == "grow_connectivity")
            cfg.grow.connectivity = static_cast<int>(parse_int(value, key));
        else if (key == "grow_max_iterations")
            cfg.grow.max_iterations = static_cast<int>(parse_int(value, key));
        else if (key == "grow_recompute_period")
            cfg.grow.recompute_period = static_cast<int>(parse_int(value, key));
        else if (key == "grow_band_floor")
            cfg.grow.band_floor = parse_real(value, key);
        else if (key == "size_mm")
            cfg.size_mm = parse_real(value, key);
        else
            throw ConfigError("unknown key: " + key);
    }
    cfg.validate();
    return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFound(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

inline std::string to_string(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "# FAZ pipeline configuration\n"
        << "size_mm = " << cfg.size_mm << "\n"
        << "tophat_se = " << cfg.tophat_se << "\n"
        << "closure_se = " << cfg.closure_se << "\n"
        << "opening_se = " << cfg.opening_se << "\n"
        << "seed_erosion_se = " << cfg.seed_erosion_se << "\n"
        << "canny_sigma = " << cfg.canny.sigma << "\n"
        << "canny_low_factor = " << cfg.canny.low_factor << "\n"
        << "canny_high_factor = " << cfg.canny.high_factor << "\n"
        << "border_margin_frac = " << cfg.filter.border_margin_frac << "\n"
        << "min_solidity = " << cfg.filter.min_solidity << "\n"
        << "min_area_px = " << cfg.filter.min_area_px << "\n"
        << "grow_tolerance = " << cfg.grow.tolerance_frac << "\n"
        << "grow_connectivity = " << cfg.grow.connectivity << "\n"
        << "grow_max_iterations = " << cfg.grow.max_iterations << "\n"
        << "grow_recompute_period = " << cfg.grow.recompute_period << "\n"
        << "grow_band_floor = " << cfg.grow.band_floor << "\n";
    return out.str();
}

inline void save_config(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << to_string(cfg);
}

}  // namespace faz
