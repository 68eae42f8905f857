#ifndef BIFEAT_PIPELINE_HPP
#define BIFEAT_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bifeat/brief.hpp"
#include "bifeat/detector.hpp"
#include "bifeat/image.hpp"
#include "bifeat/matcher.hpp"

namespace bifeat {

inline constexpr int kBufferSections = 5;

struct FrameBundle {
    int frame_index = 0;  // 1-based
    GrayImage left;
    GrayImage right;
};

/// Section assignment of the 5-section ring at one step. Three sections are
/// read (previous left, current left, current right of the step's matching
/// work) and two are written (this frame's left and right extraction
/// results). The five indices are always distinct.
struct BufferSchedule {
    int frame_index = 0;
    int rp = 0;  // holds left of frame_index - 2
    int rl = 0;  // holds left of frame_index - 1
    int rr = 0;  // holds right of frame_index - 1
    int wl = 0;  // receives left of frame_index
    int wr = 0;  // receives right of frame_index

    bool operator==(const BufferSchedule&) const = default;
};

/// Write targets advance by 3 sections per frame (mod 5), right always one
/// past left; reads trail the writes by one and two frames. Frame 1 writes
/// sections 0 and 1.
BufferSchedule schedule_sections(int frame_index);

/// Where a frame's own data went and where its matching inputs were read.
struct BufferProvenance {
    int wrote_left = 0;
    int wrote_right = 0;
    int read_prev_left = 0;
    int read_cur_left = 0;
    int read_cur_right = 0;
};

struct ExtractionResult {
    std::vector<Keypoint> keypoints;
    std::vector<Descriptor> descriptors;
    std::size_t dropped_border = 0;  // keypoints without full descriptor support
};

ExtractionResult extract_features(const GrayImage& img, std::int64_t detector_threshold,
                                  const SamplePattern& pattern,
                                  const ScaleTable& table = ScaleTable::default_table());

struct FrameResult {
    int frame_index = 0;
    ExtractionResult left_features;
    ExtractionResult right_features;
    std::optional<std::vector<MatchPair>> trace;  // absent iff frame_index == 1
    std::vector<MatchPair> stereo;
    BufferSchedule schedule;
    BufferProvenance provenance;
};

/// Checks the ring schedule as frames pass through: writes must never land
/// on a section with outstanding reads, and every read must find the frame
/// data the schedule promises. Throws std::logic_error on violation.
class MultiBufferModel {
public:
    void step(int frame_index);

private:
    struct Section {
        int frame = 0;
        char side = 0;        // 'L' or 'R'
        int pending_reads = 0;
    };
    std::array<Section, kBufferSections> sections_{};
    int last_step_ = 0;
};

struct PipelineConfig {
    std::int64_t detector_threshold = 0;
    MatchConfig match;
    SamplePattern pattern;
    ScaleTable scales = ScaleTable::default_table();
};

/// Frame-ordered two-stage model of the binocular pipeline: extraction of a
/// frame, stereo matching against its own right image, trace matching
/// against the previous left. Results are emitted per pushed frame, so
/// frame k's output is complete before frame k+1 enters.
class StereoPipeline {
public:
    explicit StereoPipeline(PipelineConfig cfg);

    FrameResult push(const FrameBundle& bundle);

private:
    PipelineConfig cfg_;
    int next_frame_ = 1;
    int width_ = 0;
    int height_ = 0;
    std::vector<Descriptor> prev_left_;
    MultiBufferModel ring_;
};

std::vector<FrameResult> process_sequence(const std::vector<FrameBundle>& frames,
                                          const PipelineConfig& cfg);

/// Streaming form: pulls bundles from source until it returns nullopt,
/// handing each FrameResult to sink before the next frame is read.
void process_sequence(const std::function<std::optional<FrameBundle>()>& source,
                      const PipelineConfig& cfg,
                      const std::function<void(const FrameResult&)>& sink);

struct DisparityPoint {
    int x = 0;
    int y = 0;
    int disparity = 0;

    bool operator==(const DisparityPoint&) const = default;
};

/// One (x, y, disparity) triple per stereo pair, coordinates taken from the
/// left (reference) point.
std::vector<DisparityPoint> compute_disparity_map(std::span<const MatchPair> stereo);

void write_disparity_csv(std::ostream& out, std::span<const DisparityPoint> points);

struct ManifestEntry {
    std::string left_path;
    std::string right_path;
};

/// One "left.pgm right.pgm" pair per line; relative paths are resolved
/// against the manifest's directory. Blank lines and '#' comments skipped.
std::vector<ManifestEntry> read_manifest(const std::string& path);

}  // namespace bifeat

#endif
