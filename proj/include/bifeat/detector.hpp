#ifndef BIFEAT_DETECTOR_HPP
#define BIFEAT_DETECTOR_HPP

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "bifeat/image.hpp"

namespace bifeat {

inline constexpr int kScaleCount = 8;

/// One level of the single-octave scale space. The box filters are built
/// from an odd lobe width: Dxx spans (3*lobe) x (2*lobe-1), Dyy its
/// transpose, Dxy four lobe x lobe quadrants. side = 3*lobe, margin is the
/// widest reach of any corner lookup from the center pixel. norm4 = side^4
/// is the plane's scale weight: raw determinants divided by it would be
/// area-normalized, so comparisons across planes cross-multiply with it
/// instead of dividing, staying exact.
struct ScaleLevel {
    double sigma = 0.0;
    int lobe = 0;
    int side = 0;
    int margin = 0;
    std::int64_t norm4 = 1;
};

int lobe_for_sigma(double sigma);

struct ScaleTable {
    std::array<ScaleLevel, kScaleCount> levels;

    static ScaleTable default_table();
    static ScaleTable from_sigmas(const std::array<double, kScaleCount>& sigmas);

    int max_margin() const { return levels.back().margin; }
};

/// Raw integer box-filter responses at one pixel. No normalization is
/// applied: the responses are exact linear functions of the pixel values,
/// and the Dxx/Dyy kernels have zero DC gain, so constant offsets cancel
/// and intensity gain a scales every response by exactly a.
struct BoxResponses {
    std::int64_t dxx = 0;
    std::int64_t dyy = 0;
    std::int64_t dxy = 0;
};

BoxResponses box_responses(const IntegralImage& ii, const ScaleLevel& level, int x, int y);

/// det(H) in the x100 integer scale: 100*Dxx*Dyy - 81*Dxy^2 (omega = 0.9).
inline std::int64_t hessian_det100(std::int64_t dxx, std::int64_t dyy, std::int64_t dxy) {
    return 100 * dxx * dyy - 81 * dxy * dxy;
}

std::int64_t hessian_response(const IntegralImage& ii, const ScaleTable& table, int x, int y,
                              int scale_index);

/// Determinant planes for all 8 scales, raw x100 integer scores. Cells
/// outside a scale's margin are invalid: they hold zero, are never produced
/// by hessian_response and are never compared during suppression.
struct ResponseStack {
    int width = 0;
    int height = 0;
    std::array<int, kScaleCount> margins{};
    std::array<std::int64_t, kScaleCount> norms{};  // side^4 per plane
    std::vector<std::int64_t> planes;               // kScaleCount * width * height

    ResponseStack() = default;
    ResponseStack(int w, int h, const ScaleTable& table);

    std::int64_t at(int scale, int x, int y) const {
        return planes[(static_cast<std::size_t>(scale) * height + y) * width + x];
    }
    std::int64_t& at(int scale, int x, int y) {
        return planes[(static_cast<std::size_t>(scale) * height + y) * width + x];
    }
    bool valid(int scale, int x, int y) const {
        const int m = margins[scale];
        return x >= m && y >= m && x < width - m && y < height - m;
    }
};

ResponseStack build_response_stack(const IntegralImage& ii, const ScaleTable& table);

struct Keypoint {
    int x = 0;
    int y = 0;
    int scale_index = 0;
    std::int64_t score = 0;

    bool operator==(const Keypoint&) const = default;
};

/// 3x3x3 non-maximum suppression over scales 1..6. A cell is kept iff its
/// area-normalized score is strictly greater than every valid cell among its
/// 26 neighbors and exceeds the threshold. The comparisons cross-multiply
/// raw scores with the planes' side^4 weights in 128-bit arithmetic, so they
/// are exact; the threshold lives in the normalized scale (raw score with
/// side^4 divided out). Output is sorted by (y, x, scale_index); the stored
/// score is the plane-local raw determinant.
std::vector<Keypoint> nms(const ResponseStack& stack, std::int64_t threshold);

std::vector<Keypoint> detect(const GrayImage& img, std::int64_t threshold,
                             const ScaleTable& table = ScaleTable::default_table());

void write_keypoints_csv(std::ostream& out, const std::vector<Keypoint>& keypoints);

}  // namespace bifeat

#endif
