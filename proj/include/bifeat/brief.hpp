#ifndef BIFEAT_BRIEF_HPP
#define BIFEAT_BRIEF_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bifeat/detector.hpp"
#include "bifeat/image.hpp"

namespace bifeat {

inline constexpr int kDescriptorBits = 128;
inline constexpr int kPatternWindow = 49;      // sample window side, offsets in [-24, 24]
inline constexpr int kDescriptorBorder = 28;   // 24 offset reach + 4 for the 9x9 mean
inline constexpr std::uint64_t kDefaultPatternSeed = 0x9e3779b97f4a7c15ull;

struct PatternPair {
    int dx1 = 0, dy1 = 0, dx2 = 0, dy2 = 0;
    bool operator==(const PatternPair&) const = default;
};

/// 128 sample-point pairs inside the 49x49 window, a pure function of the
/// seed. Offsets are drawn from an isotropic Gaussian (sigma = 49/5),
/// rounded and clamped; pairs whose two points coincide are re-drawn.
struct SamplePattern {
    std::uint64_t seed = 0;
    std::array<PatternPair, kDescriptorBits> pairs{};

    bool operator==(const SamplePattern&) const = default;
};

SamplePattern gen_pattern(std::uint64_t seed);

/// Mean of the 9x9 window centered at (x,y), truncating division by 81.
/// Throws std::out_of_range when the window leaves the image.
int mean9(const IntegralImage& ii, int x, int y);

/// 148-bit feature record: 128 descriptor bits plus the 20-bit packed
/// coordinate of the keypoint.
struct Descriptor {
    std::array<std::uint64_t, 2> bits{};  // bit i lives at bits[i/64] >> (i%64)
    std::uint32_t coord = 0;

    bool bit(int i) const { return (bits[i >> 6] >> (i & 63)) & 1u; }
    int x() const { return static_cast<int>(coord & 1023u); }
    int y() const { return static_cast<int>(coord >> 10); }

    bool operator==(const Descriptor&) const = default;
};

/// True when a keypoint at (x,y) has the full 49x49 window plus 9x9 filter
/// support inside a w x h image.
inline bool descriptor_in_bounds(int w, int h, int x, int y) {
    return x >= kDescriptorBorder && y >= kDescriptorBorder && x < w - kDescriptorBorder &&
           y < h - kDescriptorBorder;
}

Descriptor describe(const IntegralImage& ii, const Keypoint& kp, const SamplePattern& pattern);

// Pattern file: "brief-pattern v1 seed=<u64> n=49 m=128" then 128 offset lines.
void write_pattern_file(const std::string& path, const SamplePattern& pattern);
SamplePattern read_pattern_file(const std::string& path);

// Record file: little-endian, 8-byte record count then 20 bytes per record
// (16 descriptor bytes, bit 0 at byte 0 LSB, then the coordinate zero-extended
// to 4 bytes).
void write_descriptor_records(const std::string& path, const std::vector<Descriptor>& descriptors);
std::vector<Descriptor> read_descriptor_records(const std::string& path);

}  // namespace bifeat

#endif
