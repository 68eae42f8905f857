#ifndef BIFEAT_SYNTHETIC_HPP
#define BIFEAT_SYNTHETIC_HPP

#include <cstdint>

#include "bifeat/image.hpp"

namespace bifeat {

/// Uniform per-pixel noise.
GrayImage noise_image(int width, int height, std::uint64_t seed);

/// Textured blob field: mid-gray background, random filled rectangles and
/// discs at random intensities, lightly smoothed. Deterministic in the seed.
GrayImage blob_image(int width, int height, int blobs, std::uint64_t seed);

/// Square of the given odd side, its center on the lattice cell
/// (width/2, height/2).
GrayImage centered_square(int width, int height, int side, std::uint8_t fg, std::uint8_t bg);

/// Bright centered square on a dark background with faint deterministic
/// grain. Perfectly flat regions tie under strict suppression and yield no
/// maxima at all, so the smoke scene carries a few counts of noise.
GrayImage square_scene(int width, int height, int side, std::uint64_t seed = 1);

/// out(x, y) = in(x - dx, y - dy), edges clamped.
GrayImage translate(const GrayImage& img, int dx, int dy);

/// Mean filter of side 2*radius+1, window clipped at the borders.
GrayImage box_blur(const GrayImage& img, int radius);

/// Coarse intensity quantization: v -> (v / step) * step.
GrayImage quantize(const GrayImage& img, int step);

/// Saturating intensity offset.
GrayImage adjust_brightness(const GrayImage& img, int delta);

}  // namespace bifeat

#endif
