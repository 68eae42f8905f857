#include "bifeat/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bifeat {

namespace {

constexpr double kDetTolerance = 1e-9;

Homography normalized(std::array<double, 9> m) {
    if (std::abs(m[8]) < kDetTolerance)
        throw std::invalid_argument("Homography: bottom-right entry too close to zero");
    for (double& v : m) v /= m[8];
    Homography h;
    h.m = m;
    if (std::abs(h.determinant()) < kDetTolerance)
        throw std::invalid_argument("Homography: matrix is singular");
    return h;
}

}  // namespace

Homography Homography::translation(double dx, double dy) {
    return from_array({1, 0, dx, 0, 1, dy, 0, 0, 1});
}

Homography Homography::from_array(const std::array<double, 9>& raw) { return normalized(raw); }

double Homography::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
    const double det = determinant();
    if (std::abs(det) < kDetTolerance)
        throw std::invalid_argument("Homography::inverse: matrix is singular");
    std::array<double, 9> adj{
        m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
        m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
        m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
    for (double& v : adj) v /= det;
    return normalized(adj);
}

std::pair<double, double> project(const Homography& h, double x, double y) {
    const double w = h.m[6] * x + h.m[7] * y + h.m[8];
    if (std::abs(w) < kDetTolerance)
        throw std::runtime_error("project: point (" + std::to_string(x) + "," + std::to_string(y) +
                                 ") maps to infinity");
    return {(h.m[0] * x + h.m[1] * y + h.m[2]) / w, (h.m[3] * x + h.m[4] * y + h.m[5]) / w};
}

MatchClassification classify_matches(std::span<const MatchPair> matches, const Homography& h,
                                     double tol_px) {
    MatchClassification out;
    for (const MatchPair& p : matches) {
        const auto [px, py] = project(h, p.ax, p.ay);
        const double dx = px - p.bx;
        const double dy = py - p.by;
        if (std::sqrt(dx * dx + dy * dy) <= tol_px)
            ++out.correct;
        else
            ++out.incorrect;
    }
    return out;
}

std::vector<EvalPoint> recall_precision_curve(const std::vector<Descriptor>& features_a,
                                              const std::vector<Descriptor>& features_b,
                                              const Homography& h, double correspondence_tol,
                                              const std::vector<int>& thresholds,
                                              const MatchConfig& base_cfg) {
    std::size_t correspondences = 0;
    for (const Descriptor& a : features_a) {
        const auto [px, py] = project(h, a.x(), a.y());
        for (const Descriptor& b : features_b) {
            const double dx = px - b.x();
            const double dy = py - b.y();
            if (std::sqrt(dx * dx + dy * dy) <= correspondence_tol) {
                ++correspondences;
                break;
            }
        }
    }
    if (correspondences == 0)
        throw std::runtime_error("recall_precision_curve: no ground-truth correspondences between "
                                 "the feature sets; recall is undefined");

    // The per-reference argmin does not depend on the threshold, so one full
    // matching pass at 128 bits followed by per-threshold filtering gives the
    // same curve as re-running the matcher at every threshold.
    MatchConfig cfg = base_cfg;
    cfg.hamming_threshold = kDescriptorBits;
    const auto matches = trace_match(features_b, features_a, cfg);

    std::vector<EvalPoint> curve;
    curve.reserve(thresholds.size());
    std::vector<MatchPair> admitted;
    for (int t : thresholds) {
        admitted.clear();
        for (const MatchPair& p : matches)
            if (p.distance <= t) admitted.push_back(p);
        const MatchClassification cls = classify_matches(admitted, h, correspondence_tol);
        EvalPoint point;
        point.threshold = t;
        point.recall = static_cast<double>(cls.correct) / static_cast<double>(correspondences);
        const std::size_t emitted = cls.correct + cls.incorrect;
        point.one_minus_precision =
            emitted == 0 ? 0.0 : static_cast<double>(cls.incorrect) / static_cast<double>(emitted);
        curve.push_back(point);
    }
    return curve;
}

std::uint64_t throughput_model(std::uint64_t clock_hz, std::uint64_t width, std::uint64_t height,
                               std::uint64_t cameras) {
    if (clock_hz == 0 || width == 0 || height == 0 || cameras == 0)
        throw std::out_of_range("throughput_model: all arguments must be positive");
    return clock_hz / (width * height * cameras);
}

Homography read_homography(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_homography: cannot open " + path);
    std::array<double, 9> raw{};
    for (double& v : raw)
        if (!(in >> v))
            throw std::runtime_error("read_homography: " + path + " must hold 9 reals");
    return Homography::from_array(raw);
}

void write_curve_csv(std::ostream& out, std::span<const EvalPoint> points) {
    out << "threshold,recall,one_minus_precision\n";
    char row[96];
    for (const EvalPoint& p : points) {
        std::snprintf(row, sizeof row, "%d,%.9g,%.9g\n", p.threshold, p.recall,
                      p.one_minus_precision);
        out << row;
    }
}

}  // namespace bifeat
