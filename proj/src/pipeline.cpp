#include "bifeat/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bifeat {

namespace {

int mod5(int v) { return ((v % kBufferSections) + kBufferSections) % kBufferSections; }

}  // namespace

BufferSchedule schedule_sections(int frame_index) {
    if (frame_index < 1)
        throw std::out_of_range("schedule_sections: frame_index must be >= 1, got " +
                                std::to_string(frame_index));
    BufferSchedule s;
    s.frame_index = frame_index;
    s.wl = mod5(3 * (frame_index - 1));
    s.wr = mod5(3 * (frame_index - 1) + 1);
    s.rl = mod5(3 * (frame_index - 2));
    s.rr = mod5(3 * (frame_index - 2) + 1);
    s.rp = mod5(3 * (frame_index - 3));
    return s;
}

void MultiBufferModel::step(int frame_index) {
    if (frame_index != last_step_ + 1)
        throw std::logic_error("MultiBufferModel: steps must be dense, expected " +
                               std::to_string(last_step_ + 1) + " got " +
                               std::to_string(frame_index));
    const BufferSchedule s = schedule_sections(frame_index);

    // Reads of this step serve frame_index-1's matching; they must find the
    // data the schedule promises.
    auto consume = [&](int section, int frame, char side, const char* role) {
        Section& sec = sections_[section];
        if (sec.frame != frame || sec.side != side)
            throw std::logic_error("MultiBufferModel: step " + std::to_string(frame_index) + " " +
                                   role + " read of section " + std::to_string(section) +
                                   " expected frame " + std::to_string(frame) + side +
                                   ", found frame " + std::to_string(sec.frame) + sec.side);
        if (sec.pending_reads <= 0)
            throw std::logic_error("MultiBufferModel: section " + std::to_string(section) +
                                   " read more often than scheduled");
        --sec.pending_reads;
    };
    if (frame_index >= 2) {
        consume(s.rl, frame_index - 1, 'L', "RL");
        consume(s.rr, frame_index - 1, 'R', "RR");
    }
    if (frame_index >= 3) consume(s.rp, frame_index - 2, 'L', "RP");

    for (int target : {s.wl, s.wr}) {
        if (sections_[target].pending_reads != 0)
            throw std::logic_error("MultiBufferModel: step " + std::to_string(frame_index) +
                                   " overwrites section " + std::to_string(target) + " holding frame " +
                                   std::to_string(sections_[target].frame) +
                                   sections_[target].side + " before its reads completed");
    }
    // Left results are read twice (RL next step, RP the step after), right once.
    sections_[s.wl] = {frame_index, 'L', 2};
    sections_[s.wr] = {frame_index, 'R', 1};
    last_step_ = frame_index;
}

ExtractionResult extract_features(const GrayImage& img, std::int64_t detector_threshold,
                                  const SamplePattern& pattern, const ScaleTable& table) {
    if (img.width > kCoordLimit || img.height > kCoordLimit)
        throw std::invalid_argument("extract_features: " + std::to_string(img.width) + "x" +
                                    std::to_string(img.height) +
                                    " exceeds the 1024x1024 packed-coordinate range");
    ExtractionResult out;
    out.keypoints = detect(img, detector_threshold, table);
    const IntegralImage ii = compute_integral(img);
    out.descriptors.reserve(out.keypoints.size());
    for (const Keypoint& kp : out.keypoints) {
        if (!descriptor_in_bounds(img.width, img.height, kp.x, kp.y)) {
            ++out.dropped_border;
            continue;
        }
        out.descriptors.push_back(describe(ii, kp, pattern));
    }
    return out;
}

StereoPipeline::StereoPipeline(PipelineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.match.validate();
}

FrameResult StereoPipeline::push(const FrameBundle& bundle) {
    const int k = bundle.frame_index;
    if (k != next_frame_)
        throw std::runtime_error("StereoPipeline: expected frame " + std::to_string(next_frame_) +
                                 ", got frame " + std::to_string(k));
    if (!bundle.left.same_size(bundle.right))
        throw std::runtime_error("StereoPipeline: frame " + std::to_string(k) +
                                 " left and right differ in size");
    if (width_ == 0) {
        width_ = bundle.left.width;
        height_ = bundle.left.height;
    } else if (bundle.left.width != width_ || bundle.left.height != height_) {
        throw std::runtime_error("StereoPipeline: frame " + std::to_string(k) + " is " +
                                 std::to_string(bundle.left.width) + "x" +
                                 std::to_string(bundle.left.height) + ", sequence started at " +
                                 std::to_string(width_) + "x" + std::to_string(height_));
    }

    FrameResult result;
    result.frame_index = k;
    result.left_features = extract_features(bundle.left, cfg_.detector_threshold, cfg_.pattern,
                                            cfg_.scales);
    result.right_features = extract_features(bundle.right, cfg_.detector_threshold, cfg_.pattern,
                                             cfg_.scales);
    result.stereo = stereo_match(result.left_features.descriptors,
                                 result.right_features.descriptors, cfg_.match);
    if (k >= 2)
        result.trace = trace_match(prev_left_, result.left_features.descriptors, cfg_.match);

    ring_.step(k);
    result.schedule = schedule_sections(k);
    const BufferSchedule next = schedule_sections(k + 1);
    result.provenance = {result.schedule.wl, result.schedule.wr, next.rp, next.rl, next.rr};

    prev_left_ = result.left_features.descriptors;
    ++next_frame_;
    return result;
}

std::vector<FrameResult> process_sequence(const std::vector<FrameBundle>& frames,
                                          const PipelineConfig& cfg) {
    StereoPipeline pipeline(cfg);
    std::vector<FrameResult> results;
    results.reserve(frames.size());
    for (const FrameBundle& bundle : frames) results.push_back(pipeline.push(bundle));
    return results;
}

void process_sequence(const std::function<std::optional<FrameBundle>()>& source,
                      const PipelineConfig& cfg,
                      const std::function<void(const FrameResult&)>& sink) {
    StereoPipeline pipeline(cfg);
    while (auto bundle = source()) sink(pipeline.push(*bundle));
}

std::vector<DisparityPoint> compute_disparity_map(std::span<const MatchPair> stereo) {
    std::vector<DisparityPoint> out;
    out.reserve(stereo.size());
    for (const MatchPair& p : stereo) out.push_back({p.ax, p.ay, p.disparity});
    return out;
}

void write_disparity_csv(std::ostream& out, std::span<const DisparityPoint> points) {
    out << "x,y,disparity\n";
    for (const DisparityPoint& p : points) out << p.x << ',' << p.y << ',' << p.disparity << '\n';
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_manifest: cannot open " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    std::vector<ManifestEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string left, right, extra;
        if (!(fields >> left >> right) || (fields >> extra))
            throw std::runtime_error("read_manifest: line " + std::to_string(line_no) + " of " +
                                     path + " must hold exactly two paths");
        entries.push_back({resolve(left), resolve(right)});
    }
    return entries;
}

}  // namespace bifeat
