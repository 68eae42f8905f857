#ifndef BIFEAT_MATCHER_HPP
#define BIFEAT_MATCHER_HPP

#include <bit>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "bifeat/brief.hpp"

namespace bifeat {

struct MatchConfig {
    int hamming_threshold = 32;  // bits of 128
    int epipolar_epsilon = 1;    // max |y_left - y_right| for stereo pairs
    int max_disparity = 128;
    int cores_per_group = 8;     // reference descriptors matched per batch

    void validate() const;
};

enum class MatchKind { trace, stereo };

struct MatchPair {
    int ax = 0, ay = 0;  // reference point (current left)
    int bx = 0, by = 0;  // matched point (previous left / current right)
    int distance = 0;
    MatchKind kind = MatchKind::trace;
    int disparity = 0;   // ax - bx, stereo only

    bool operator==(const MatchPair&) const = default;
};

inline int hamming(const Descriptor& a, const Descriptor& b) {
    return std::popcount(a.bits[0] ^ b.bits[0]) + std::popcount(a.bits[1] ^ b.bits[1]);
}

struct CoreResult {
    std::size_t best_index = 0;
    int distance = 0;
};

/// One batch cycle: load the references into one core each, stream every
/// candidate past all cores, keep the first candidate achieving each
/// strictly smaller distance. Throws std::invalid_argument when the
/// candidate stream is empty.
std::vector<CoreResult> match_batch(std::span<const Descriptor> refs,
                                    std::span<const Descriptor> candidates);

/// Temporal matching: current-left descriptors are the references, batched
/// cores_per_group at a time; previous-left descriptors stream past them.
/// Pairs farther than hamming_threshold are dropped.
std::vector<MatchPair> trace_match(const std::vector<Descriptor>& prev_left,
                                   const std::vector<Descriptor>& cur_left,
                                   const MatchConfig& cfg);

/// Same-frame matching of rectified left (reference) against right, with the
/// threshold check plus the epipolar parallel check: |y_L - y_R| <= epsilon
/// and 0 <= x_L - x_R <= max_disparity. disparity = x_L - x_R.
std::vector<MatchPair> stereo_match(const std::vector<Descriptor>& cur_left,
                                    const std::vector<Descriptor>& cur_right,
                                    const MatchConfig& cfg);

/// CSV: kind,xa,ya,xb,yb,distance,disparity (disparity blank on trace rows).
void write_matches_csv(std::ostream& out, std::span<const MatchPair> pairs);

}  // namespace bifeat

#endif
