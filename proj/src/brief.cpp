#include "bifeat/brief.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace bifeat {

namespace {

// Deterministic Gaussian source: Box-Muller over mt19937_64 output mapped to
// doubles by hand, so patterns do not depend on the standard library's
// unspecified normal_distribution algorithm.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // in (0, 1], keeps log finite
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

int draw_offset(GaussianSource& gauss) {
    const double sigma = static_cast<double>(kPatternWindow) / 5.0;
    const long v = std::lround(sigma * gauss.next());
    const long limit = (kPatternWindow - 1) / 2;
    return static_cast<int>(std::clamp(v, -limit, limit));
}

}  // namespace

SamplePattern gen_pattern(std::uint64_t seed) {
    SamplePattern pattern;
    pattern.seed = seed;
    GaussianSource gauss(seed);
    for (PatternPair& pair : pattern.pairs) {
        do {
            pair.dx1 = draw_offset(gauss);
            pair.dy1 = draw_offset(gauss);
            pair.dx2 = draw_offset(gauss);
            pair.dy2 = draw_offset(gauss);
        } while (pair.dx1 == pair.dx2 && pair.dy1 == pair.dy2);
    }
    return pattern;
}

int mean9(const IntegralImage& ii, int x, int y) {
    if (x < 4 || y < 4 || x >= ii.width - 4 || y >= ii.height - 4)
        throw std::out_of_range("mean9: (" + std::to_string(x) + "," + std::to_string(y) +
                                ") closer than 4 px to the border");
    return static_cast<int>(box_sum(ii, {x - 4, y - 4, x + 4, y + 4}) / 81);
}

Descriptor describe(const IntegralImage& ii, const Keypoint& kp, const SamplePattern& pattern) {
    if (kp.x < kDescriptorBorder || kp.y < kDescriptorBorder ||
        kp.x >= ii.width - kDescriptorBorder || kp.y >= ii.height - kDescriptorBorder)
        throw std::out_of_range("describe: keypoint (" + std::to_string(kp.x) + "," +
                                std::to_string(kp.y) + ") closer than " +
                                std::to_string(kDescriptorBorder) + " px to the border");
    Descriptor d;
    for (int i = 0; i < kDescriptorBits; ++i) {
        const PatternPair& p = pattern.pairs[i];
        if (mean9(ii, kp.x + p.dx1, kp.y + p.dy1) > mean9(ii, kp.x + p.dx2, kp.y + p.dy2))
            d.bits[i >> 6] |= 1ull << (i & 63);
    }
    d.coord = pack_coord(kp.x, kp.y);
    return d;
}

void write_pattern_file(const std::string& path, const SamplePattern& pattern) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_pattern_file: cannot open " + path);
    out << "brief-pattern v1 seed=" << pattern.seed << " n=" << kPatternWindow
        << " m=" << kDescriptorBits << "\n";
    for (const PatternPair& p : pattern.pairs)
        out << p.dx1 << ' ' << p.dy1 << ' ' << p.dx2 << ' ' << p.dy2 << "\n";
    if (!out) throw std::runtime_error("write_pattern_file: write failed for " + path);
}

SamplePattern read_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_pattern_file: cannot open " + path);
    std::string header;
    std::getline(in, header);
    SamplePattern pattern;
    unsigned long long seed = 0;
    int n = 0, m = 0;
    if (std::sscanf(header.c_str(), "brief-pattern v1 seed=%llu n=%d m=%d", &seed, &n, &m) != 3 ||
        n != kPatternWindow || m != kDescriptorBits)
        throw std::runtime_error("read_pattern_file: bad header in " + path + ": " + header);
    pattern.seed = seed;
    const int limit = (kPatternWindow - 1) / 2;
    for (int i = 0; i < kDescriptorBits; ++i) {
        PatternPair& p = pattern.pairs[i];
        if (!(in >> p.dx1 >> p.dy1 >> p.dx2 >> p.dy2))
            throw std::runtime_error("read_pattern_file: truncated at pair " + std::to_string(i) +
                                     " in " + path);
        if (std::abs(p.dx1) > limit || std::abs(p.dy1) > limit || std::abs(p.dx2) > limit ||
            std::abs(p.dy2) > limit)
            throw std::runtime_error("read_pattern_file: offset out of window at pair " +
                                     std::to_string(i) + " in " + path);
    }
    return pattern;
}

namespace {

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint32_t get_u32_le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

void write_descriptor_records(const std::string& path, const std::vector<Descriptor>& descriptors) {
    std::string buf;
    buf.reserve(8 + 20 * descriptors.size());
    put_u64_le(buf, descriptors.size());
    for (const Descriptor& d : descriptors) {
        put_u64_le(buf, d.bits[0]);
        put_u64_le(buf, d.bits[1]);
        put_u32_le(buf, d.coord);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_descriptor_records: cannot open " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write_descriptor_records: write failed for " + path);
}

std::vector<Descriptor> read_descriptor_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_descriptor_records: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
    if (buf.size() < 8)
        throw std::runtime_error("read_descriptor_records: " + path + " truncated at byte offset " +
                                 std::to_string(buf.size()) + " (8-byte count header expected)");
    const std::uint64_t count = get_u64_le(p);
    const std::uint64_t expected = 8 + 20 * count;
    if (buf.size() != expected)
        throw std::runtime_error("read_descriptor_records: " + path + " has " +
                                 std::to_string(buf.size()) + " bytes, expected " +
                                 std::to_string(expected) + "; malformed at byte offset " +
                                 std::to_string(std::min<std::uint64_t>(buf.size(), expected)));
    std::vector<Descriptor> out(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const unsigned char* rec = p + 8 + 20 * i;
        out[i].bits[0] = get_u64_le(rec);
        out[i].bits[1] = get_u64_le(rec + 8);
        out[i].coord = get_u32_le(rec + 16);
        if (out[i].coord >= (1u << 20))
            throw std::runtime_error("read_descriptor_records: coordinate wider than 20 bits at byte offset " +
                                     std::to_string(8 + 20 * i + 16) + " in " + path);
    }
    return out;
}

}  // namespace bifeat
