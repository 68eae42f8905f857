#ifndef BIFEAT_EVAL_HPP
#define BIFEAT_EVAL_HPP

#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bifeat/brief.hpp"
#include "bifeat/matcher.hpp"

namespace bifeat {

/// Planar map between two views, row-major 3x3 with the bottom-right entry
/// normalized to 1. Must be invertible (|det| > 1e-9).
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Homography identity() { return {}; }
    static Homography translation(double dx, double dy);
    static Homography from_array(const std::array<double, 9>& raw);

    double determinant() const;
    Homography inverse() const;
};

std::pair<double, double> project(const Homography& h, double x, double y);

struct MatchClassification {
    std::size_t correct = 0;
    std::size_t incorrect = 0;
};

/// A match (a -> b) counts as correct iff the projection of a lands within
/// tol_px (Euclidean) of b.
MatchClassification classify_matches(std::span<const MatchPair> matches, const Homography& h,
                                     double tol_px = 3.0);

struct EvalPoint {
    int threshold = 0;
    double recall = 0.0;
    double one_minus_precision = 0.0;
};

/// Sweeps the Hamming threshold over trace-style matching from set A to set
/// B. recall = correct / correspondences; 1-precision = false /
/// (correct + false), defined as 0 when nothing is emitted. A keypoint of A
/// has a correspondence when its projection lies within correspondence_tol
/// of some keypoint of B; zero correspondences is an error.
std::vector<EvalPoint> recall_precision_curve(const std::vector<Descriptor>& features_a,
                                              const std::vector<Descriptor>& features_b,
                                              const Homography& h, double correspondence_tol,
                                              const std::vector<int>& thresholds,
                                              const MatchConfig& base_cfg = {});

/// Analytic frame rate of a pixel-per-clock pipeline:
/// floor(clock_hz / (width * height * cameras)).
std::uint64_t throughput_model(std::uint64_t clock_hz, std::uint64_t width, std::uint64_t height,
                               std::uint64_t cameras);

/// 9 whitespace-separated reals, row-major.
Homography read_homography(const std::string& path);

/// CSV: threshold,recall,one_minus_precision.
void write_curve_csv(std::ostream& out, std::span<const EvalPoint> points);

}  // namespace bifeat

#endif
