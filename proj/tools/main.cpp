#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "bifeat/config.hpp"
#include "bifeat/eval.hpp"
#include "bifeat/pipeline.hpp"
#include "bifeat/synthetic.hpp"

namespace fs = std::filesystem;
using namespace bifeat;

namespace {

constexpr std::uint64_t kModelClockHz = 100'000'000;  // throughput model operating point

struct CommonFlags {
    std::string config_path;
    std::optional<std::int64_t> threshold;
    std::optional<int> hamming_threshold;
    std::optional<int> epsilon;
    std::optional<int> max_disparity;
    std::optional<int> cores;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (key = value lines)");
    cmd->add_option("--threshold", flags.threshold, "Detector score threshold");
    cmd->add_option("--hamming-threshold", flags.hamming_threshold, "Match distance cutoff in bits");
    cmd->add_option("--epsilon", flags.epsilon, "Stereo vertical tolerance in pixels");
    cmd->add_option("--max-disparity", flags.max_disparity, "Stereo disparity search range");
    cmd->add_option("--cores", flags.cores, "Match cores per batch");
    cmd->add_option("--seed", flags.seed, "Sampling pattern seed");
    cmd->add_option("--out", flags.out, "Output directory (gen-pattern: output file)");
}

RunConfig resolve_config(const CommonFlags& flags) {
    RunConfig cfg = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
    if (flags.threshold) cfg.detector_threshold = *flags.threshold;
    if (flags.hamming_threshold) cfg.match.hamming_threshold = *flags.hamming_threshold;
    if (flags.epsilon) cfg.match.epipolar_epsilon = *flags.epsilon;
    if (flags.max_disparity) cfg.match.max_disparity = *flags.max_disparity;
    if (flags.cores) cfg.match.cores_per_group = *flags.cores;
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.out_dir = *flags.out;
    cfg.match.validate();
    return cfg;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_text_file(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    fill(out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

int cmd_extract(const std::string& image_path, const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const GrayImage img = read_pgm(image_path);
    const ExtractionResult res =
        extract_features(img, cfg.detector_threshold, cfg.pattern(), cfg.scale_table());
    const fs::path dir = ensure_out_dir(cfg);
    const std::string stem = fs::path(image_path).stem().string();
    write_text_file(dir / (stem + ".keypoints.csv"),
                    [&](std::ostream& out) { write_keypoints_csv(out, res.keypoints); });
    write_descriptor_records((dir / (stem + ".desc.bin")).string(), res.descriptors);
    std::cout << "keypoints: " << res.keypoints.size() << "  descriptors: " << res.descriptors.size()
              << "  dropped-border: " << res.dropped_border << "\n";
    return 0;
}

int cmd_match(const std::string& path_a, const std::string& path_b, const std::string& mode,
              const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const auto a = read_descriptor_records(path_a);
    const auto b = read_descriptor_records(path_b);
    std::vector<MatchPair> pairs;
    if (mode == "trace")
        pairs = trace_match(b, a, cfg.match);  // A is the current (reference) set
    else if (mode == "stereo")
        pairs = stereo_match(a, b, cfg.match);  // A is the left (reference) set
    else
        throw std::runtime_error("match: mode must be 'trace' or 'stereo', got '" + mode + "'");
    const fs::path dir = ensure_out_dir(cfg);
    write_text_file(dir / "matches.csv", [&](std::ostream& out) { write_matches_csv(out, pairs); });
    std::cout << "matches: " << pairs.size() << "\n";
    return 0;
}

int cmd_run(const std::string& manifest_path, const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const auto entries = read_manifest(manifest_path);
    if (entries.empty()) throw std::runtime_error("run: manifest " + manifest_path + " lists no frames");
    const fs::path dir = ensure_out_dir(cfg);

    PipelineConfig pipe_cfg{cfg.detector_threshold, cfg.match, cfg.pattern(), cfg.scale_table()};
    std::size_t next = 0;
    int width = 0, height = 0;
    auto source = [&]() -> std::optional<FrameBundle> {
        if (next >= entries.size()) return std::nullopt;
        const int index = static_cast<int>(next) + 1;
        const ManifestEntry& entry = entries[next++];
        FrameBundle bundle;
        bundle.frame_index = index;
        try {
            bundle.left = read_pgm(entry.left_path);
            bundle.right = read_pgm(entry.right_path);
        } catch (const std::exception& e) {
            throw std::runtime_error("run: frame " + std::to_string(index) + ": " + e.what());
        }
        width = bundle.left.width;
        height = bundle.left.height;
        return bundle;
    };
    auto sink = [&](const FrameResult& result) {
        char name[48];
        std::snprintf(name, sizeof name, "frame_%04d_stereo.csv", result.frame_index);
        write_text_file(dir / name,
                        [&](std::ostream& out) { write_matches_csv(out, result.stereo); });
        if (result.trace) {
            std::snprintf(name, sizeof name, "frame_%04d_trace.csv", result.frame_index);
            write_text_file(dir / name,
                            [&](std::ostream& out) { write_matches_csv(out, *result.trace); });
        }
        const auto disparity = compute_disparity_map(result.stereo);
        std::snprintf(name, sizeof name, "frame_%04d_disparity.csv", result.frame_index);
        write_text_file(dir / name,
                        [&](std::ostream& out) { write_disparity_csv(out, disparity); });
        std::cout << "frame " << result.frame_index << ": keypoints L="
                  << result.left_features.descriptors.size()
                  << " R=" << result.right_features.descriptors.size()
                  << ", trace=" << (result.trace ? result.trace->size() : 0)
                  << ", stereo=" << result.stereo.size() << "\n";
    };
    process_sequence(source, pipe_cfg, sink);

    const std::uint64_t fps = throughput_model(kModelClockHz, width, height, 2);
    std::cout << "model fps: " << fps << " (binocular @100MHz)\n";
    return 0;
}

int cmd_eval(const std::string& path_a, const std::string& path_b, const std::string& h_path,
             const CommonFlags& flags) {
    const RunConfig cfg = resolve_config(flags);
    const auto a = read_descriptor_records(path_a);
    const auto b = read_descriptor_records(path_b);
    const Homography h = read_homography(h_path);
    std::vector<int> thresholds;
    for (int t = 0; t <= kDescriptorBits; t += cfg.sweep_step) thresholds.push_back(t);
    if (thresholds.back() != kDescriptorBits) thresholds.push_back(kDescriptorBits);
    const auto curve = recall_precision_curve(a, b, h, 3.0, thresholds, cfg.match);
    const fs::path dir = ensure_out_dir(cfg);
    write_text_file(dir / "curve.csv", [&](std::ostream& out) { write_curve_csv(out, curve); });
    std::cout << "curve points: " << curve.size() << "\n";
    return 0;
}

int cmd_gen_pattern(const CommonFlags& flags) {
    const std::uint64_t seed = flags.seed.value_or(kDefaultPatternSeed);
    const std::string out_path = flags.out.value_or("brief_pattern.txt");
    write_pattern_file(out_path, gen_pattern(seed));
    std::cout << "pattern: " << out_path << " (seed " << seed << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binocular SURF/BRIEF feature extraction and matching pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string image_path, path_a, path_b, mode, manifest_path, h_path;

    CLI::App* extract = app.add_subcommand("extract", "Detect keypoints and write descriptors");
    extract->add_option("image", image_path, "Input PGM (P5)")->required();
    add_common_flags(extract, flags);

    CLI::App* match = app.add_subcommand("match", "Match two descriptor record files");
    match->add_option("a", path_a, "Reference records (current/left)")->required();
    match->add_option("b", path_b, "Candidate records (previous/right)")->required();
    match->add_option("mode", mode, "trace | stereo")->required();
    add_common_flags(match, flags);

    CLI::App* run = app.add_subcommand("run", "Process a binocular frame sequence");
    run->add_option("manifest", manifest_path, "Text file, one 'left.pgm right.pgm' per line")
        ->required();
    add_common_flags(run, flags);

    CLI::App* eval = app.add_subcommand("eval", "Recall / 1-precision curve under a homography");
    eval->add_option("a", path_a, "Feature records of image A")->required();
    eval->add_option("b", path_b, "Feature records of image B")->required();
    eval->add_option("homography", h_path, "9-number homography file mapping A to B")->required();
    add_common_flags(eval, flags);

    CLI::App* gen = app.add_subcommand("gen-pattern", "Write a sampling pattern file");
    add_common_flags(gen, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed()) return cmd_extract(image_path, flags);
        if (match->parsed()) return cmd_match(path_a, path_b, mode, flags);
        if (run->parsed()) return cmd_run(manifest_path, flags);
        if (eval->parsed()) return cmd_eval(path_a, path_b, h_path, flags);
        if (gen->parsed()) return cmd_gen_pattern(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
