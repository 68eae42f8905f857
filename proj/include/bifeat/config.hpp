#ifndef BIFEAT_CONFIG_HPP
#define BIFEAT_CONFIG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "bifeat/brief.hpp"
#include "bifeat/detector.hpp"
#include "bifeat/matcher.hpp"

namespace bifeat {

/// Desk-scale default for the raw x100 determinant score; calibrated so the
/// bright-square smoke image yields a handful of keypoints.
inline constexpr std::int64_t kDefaultDetectorThreshold = 500;

struct RunConfig {
    std::int64_t detector_threshold = kDefaultDetectorThreshold;
    MatchConfig match;
    std::string pattern_path;  // empty: generate from seed
    std::uint64_t seed = kDefaultPatternSeed;
    std::optional<std::array<double, kScaleCount>> scales;
    std::string out_dir = ".";
    int sweep_step = 8;  // eval threshold sweep step

    ScaleTable scale_table() const;
    SamplePattern pattern() const;  // loads pattern_path or generates from seed
};

/// "key = value" lines, '#' comments. Unknown keys are rejected. Keys:
/// detector_threshold, hamming_threshold, epsilon, max_disparity, cores,
/// pattern, seed, scales (8 comma-separated reals), out_dir, sweep_step.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace bifeat

#endif
