#include "bifeat/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bifeat {

ScaleTable RunConfig::scale_table() const {
    return scales ? ScaleTable::from_sigmas(*scales) : ScaleTable::default_table();
}

SamplePattern RunConfig::pattern() const {
    return pattern_path.empty() ? gen_pattern(seed) : read_pattern_file(pattern_path);
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& value, const std::string& origin) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(origin + ": key '" + key + "' needs an integer, got '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value, const std::string& origin) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size() || value[0] == '-') throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(origin + ": key '" + key + "' needs an unsigned integer, got '" +
                                 value + "'");
    }
}

std::array<double, kScaleCount> parse_scales(const std::string& value, const std::string& origin) {
    std::array<double, kScaleCount> out{};
    std::istringstream in(value);
    std::string item;
    int i = 0;
    while (std::getline(in, item, ',')) {
        if (i >= kScaleCount)
            throw std::runtime_error(origin + ": key 'scales' needs exactly 8 values");
        try {
            out[i++] = std::stod(trim(item));
        } catch (const std::exception&) {
            throw std::runtime_error(origin + ": bad scale value '" + item + "'");
        }
    }
    if (i != kScaleCount) throw std::runtime_error(origin + ": key 'scales' needs exactly 8 values");
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "detector_threshold")
            cfg.detector_threshold = parse_int(key, value, origin);
        else if (key == "hamming_threshold")
            cfg.match.hamming_threshold = static_cast<int>(parse_int(key, value, origin));
        else if (key == "epsilon")
            cfg.match.epipolar_epsilon = static_cast<int>(parse_int(key, value, origin));
        else if (key == "max_disparity")
            cfg.match.max_disparity = static_cast<int>(parse_int(key, value, origin));
        else if (key == "cores")
            cfg.match.cores_per_group = static_cast<int>(parse_int(key, value, origin));
        else if (key == "pattern")
            cfg.pattern_path = value;
        else if (key == "seed")
            cfg.seed = parse_uint(key, value, origin);
        else if (key == "scales")
            cfg.scales = parse_scales(value, origin);
        else if (key == "out_dir")
            cfg.out_dir = value;
        else if (key == "sweep_step")
            cfg.sweep_step = static_cast<int>(parse_int(key, value, origin));
        else
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": unknown key '" +
                                     key + "'");
    }
    cfg.match.validate();
    if (cfg.sweep_step < 1) throw std::runtime_error(origin + ": sweep_step must be >= 1");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config_text(buf.str(), path);
    // Relative pattern paths count from the config file's directory.
    if (!cfg.pattern_path.empty() && std::filesystem::path(cfg.pattern_path).is_relative())
        cfg.pattern_path = (std::filesystem::path(path).parent_path() / cfg.pattern_path).string();
    return cfg;
}

}  // namespace bifeat
