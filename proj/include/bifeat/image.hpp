#ifndef BIFEAT_IMAGE_HPP
#define BIFEAT_IMAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace bifeat {

/// 8-bit single-channel raster, row-major, origin top-left.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    bool same_size(const GrayImage& other) const {
        return width == other.width && height == other.height;
    }
};

/// Inclusive prefix-sum raster: at(x,y) holds the sum of all source pixels
/// with coordinates <= (x,y). 32-bit storage is lossless for 4096x4096x255.
struct IntegralImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> data;

    std::uint32_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Inclusive pixel bounds of a box-filter support region.
struct Rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;
};

IntegralImage compute_integral(const GrayImage& img);

/// Exact sum of source pixels inside r, from at most 4 integral lookups,
/// one addition and two subtractions. Throws std::out_of_range when r is
/// not contained in the image.
std::int64_t box_sum(const IntegralImage& ii, const Rect& r);

inline constexpr int kCoordLimit = 1024;  // 20-bit packed coordinates, x in the low 10 bits

std::uint32_t pack_coord(int x, int y);
void unpack_coord(std::uint32_t code, int& x, int& y);

// Binary PGM (P5, maxval 255).
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& img);

}  // namespace bifeat

#endif
