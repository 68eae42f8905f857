#include "bifeat/synthetic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace bifeat {

GrayImage noise_image(int width, int height, std::uint64_t seed) {
    GrayImage img(width, height);
    std::mt19937_64 rng(seed);
    for (auto& px : img.data) px = static_cast<std::uint8_t>(rng() & 0xff);
    return img;
}

GrayImage blob_image(int width, int height, int blobs, std::uint64_t seed) {
    GrayImage img(width, height, 128);
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    for (int i = 0; i < blobs; ++i) {
        const int cx = uniform(0, width - 1);
        const int cy = uniform(0, height - 1);
        const int r = uniform(3, 24);
        const auto value = static_cast<std::uint8_t>(uniform(0, 255));
        const bool disc = (rng() & 1) != 0;
        for (int y = std::max(0, cy - r); y <= std::min(height - 1, cy + r); ++y)
            for (int x = std::max(0, cx - r); x <= std::min(width - 1, cx + r); ++x)
                if (!disc || (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.at(x, y) = value;
    }
    return box_blur(img, 1);
}

GrayImage centered_square(int width, int height, int side, std::uint8_t fg, std::uint8_t bg) {
    if (side < 1 || side % 2 == 0)
        throw std::invalid_argument("centered_square: side must be odd and positive");
    GrayImage img(width, height, bg);
    const int cx = width / 2;
    const int cy = height / 2;
    const int r = side / 2;
    if (cx - r < 0 || cy - r < 0 || cx + r >= width || cy + r >= height)
        throw std::invalid_argument("centered_square: square does not fit");
    for (int y = cy - r; y <= cy + r; ++y)
        for (int x = cx - r; x <= cx + r; ++x) img.at(x, y) = fg;
    return img;
}

GrayImage square_scene(int width, int height, int side, std::uint64_t seed) {
    GrayImage img = centered_square(width, height, side, 255, 0);
    std::mt19937_64 rng(seed);
    for (auto& px : img.data) {
        const int grain = static_cast<int>(rng() % 13);
        px = static_cast<std::uint8_t>(px == 0 ? grain : px - grain);
    }
    return img;
}

GrayImage translate(const GrayImage& img, int dx, int dy) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int sx = std::clamp(x - dx, 0, img.width - 1);
            const int sy = std::clamp(y - dy, 0, img.height - 1);
            out.at(x, y) = img.at(sx, sy);
        }
    return out;
}

GrayImage box_blur(const GrayImage& img, int radius) {
    if (radius < 0) throw std::invalid_argument("box_blur: radius must be >= 0");
    if (radius == 0) return img;
    const IntegralImage ii = compute_integral(img);
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const Rect r{std::max(0, x - radius), std::max(0, y - radius),
                         std::min(img.width - 1, x + radius), std::min(img.height - 1, y + radius)};
            const std::int64_t area =
                static_cast<std::int64_t>(r.x1 - r.x0 + 1) * (r.y1 - r.y0 + 1);
            out.at(x, y) = static_cast<std::uint8_t>(box_sum(ii, r) / area);
        }
    return out;
}

GrayImage quantize(const GrayImage& img, int step) {
    if (step < 1 || step > 255) throw std::invalid_argument("quantize: step must be in 1..255");
    GrayImage out = img;
    for (auto& px : out.data) px = static_cast<std::uint8_t>((px / step) * step);
    return out;
}

GrayImage adjust_brightness(const GrayImage& img, int delta) {
    GrayImage out = img;
    for (auto& px : out.data) px = static_cast<std::uint8_t>(std::clamp(px + delta, 0, 255));
    return out;
}

}  // namespace bifeat
