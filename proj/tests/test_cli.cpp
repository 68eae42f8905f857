#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bifeat/brief.hpp"
#include "bifeat/config.hpp"
#include "bifeat/eval.hpp"
#include "bifeat/matcher.hpp"
#include "bifeat/pipeline.hpp"
#include "bifeat/synthetic.hpp"

using namespace bifeat;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BIFEAT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("cli extract: constant image yields empty artifacts, runs are byte-identical") {
    TempDir dir("bifeat_cli_extract");
    const fs::path pgm = dir.path / "flat.pgm";
    write_pgm(pgm.string(), GrayImage(160, 120, 77));

    const std::string out1 = (dir.path / "out1").string();
    const std::string out2 = (dir.path / "out2").string();
    REQUIRE(run_cli("extract " + pgm.string() + " --out " + out1) == 0);
    REQUIRE(run_cli("extract " + pgm.string() + " --out " + out2) == 0);

    CHECK(slurp(fs::path(out1) / "flat.keypoints.csv") == "x,y,scale_index,score\n");
    const std::string records = slurp(fs::path(out1) / "flat.desc.bin");
    CHECK(records.size() == 8);  // zero-count header only
    CHECK(records == std::string(8, '\0'));

    CHECK(slurp(fs::path(out1) / "flat.desc.bin") == slurp(fs::path(out2) / "flat.desc.bin"));
    CHECK(slurp(fs::path(out1) / "flat.keypoints.csv") == slurp(fs::path(out2) / "flat.keypoints.csv"));

    CHECK(run_cli("extract " + (dir.path / "missing.pgm").string()) == 1);
}

TEST_CASE("cli extract on the bright-square scene matches the library") {
    TempDir dir("bifeat_cli_extract2");
    const GrayImage img = square_scene(640, 480, 15);
    const fs::path pgm = dir.path / "scene.pgm";
    write_pgm(pgm.string(), img);
    const std::string out = (dir.path / "out").string();
    REQUIRE(run_cli("extract " + pgm.string() + " --out " + out) == 0);

    const auto records = read_descriptor_records((fs::path(out) / "scene.desc.bin").string());
    const auto expected =
        extract_features(img, kDefaultDetectorThreshold, gen_pattern(kDefaultPatternSeed));
    REQUIRE(!expected.keypoints.empty());
    CHECK(expected.keypoints.size() <= 50);
    CHECK(records == expected.descriptors);

    std::ostringstream kp_csv;
    write_keypoints_csv(kp_csv, expected.keypoints);
    CHECK(slurp(fs::path(out) / "scene.keypoints.csv") == kp_csv.str());
}

TEST_CASE("cli match: self trace at distance zero, empty input, wrapper equivalence") {
    TempDir dir("bifeat_cli_match");
    const GrayImage img = blob_image(200, 160, 50, 8);
    const auto feats = extract_features(img, 500, gen_pattern(kDefaultPatternSeed));
    REQUIRE(!feats.descriptors.empty());
    const std::string rec = (dir.path / "scene.bin").string();
    write_descriptor_records(rec, feats.descriptors);

    const std::string out = (dir.path / "out").string();
    REQUIRE(run_cli("match " + rec + " " + rec + " trace --out " + out) == 0);
    std::ostringstream expect;
    write_matches_csv(expect, trace_match(feats.descriptors, feats.descriptors, MatchConfig{}));
    CHECK(slurp(fs::path(out) / "matches.csv") == expect.str());
    for (const MatchPair& p : trace_match(feats.descriptors, feats.descriptors, MatchConfig{}))
        CHECK(p.distance == 0);

    const std::string empty_rec = (dir.path / "empty.bin").string();
    write_descriptor_records(empty_rec, {});
    REQUIRE(run_cli("match " + empty_rec + " " + rec + " trace --out " + out) == 0);
    CHECK(slurp(fs::path(out) / "matches.csv") == "kind,xa,ya,xb,yb,distance,disparity\n");

    // Stereo mode emits the disparity column.
    const GrayImage right = translate(img, -10, 0);
    const auto rfeats = extract_features(right, 500, gen_pattern(kDefaultPatternSeed));
    const std::string rrec = (dir.path / "right.bin").string();
    write_descriptor_records(rrec, rfeats.descriptors);
    REQUIRE(run_cli("match " + rec + " " + rrec + " stereo --out " + out) == 0);
    std::ostringstream sexpect;
    write_matches_csv(sexpect, stereo_match(feats.descriptors, rfeats.descriptors, MatchConfig{}));
    CHECK(slurp(fs::path(out) / "matches.csv") == sexpect.str());

    // Malformed record file: error mentioning the byte offset, nonzero exit.
    const std::string broken = (dir.path / "broken.bin").string();
    {
        std::ofstream bo(broken, std::ios::binary);
        bo.write("\x05\x00\x00", 3);
    }
    CHECK(run_cli("match " + broken + " " + rec + " trace --out " + out) == 1);
    CHECK(run_cli("match " + rec + " " + rec + " sideways --out " + out) == 1);
}

TEST_CASE("cli run: manifest processing, per-frame artifacts, model fps line") {
    TempDir dir("bifeat_cli_run");
    const GrayImage left = blob_image(640, 480, 160, 99);
    const GrayImage right = translate(left, -10, 0);
    write_pgm((dir.path / "l.pgm").string(), left);
    write_pgm((dir.path / "r.pgm").string(), right);
    {
        std::ofstream manifest(dir.path / "frames.txt");
        for (int i = 0; i < 3; ++i) manifest << "l.pgm r.pgm\n";
    }
    const std::string out = (dir.path / "out").string();
    const std::string log = (dir.path / "run.log").string();
    const std::string cmd = std::string(BIFEAT_CLI_PATH) + " run " + (dir.path / "frames.txt").string() +
                            " --threshold 500 --out " + out + " > " + log + " 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);

    CHECK(fs::exists(fs::path(out) / "frame_0001_stereo.csv"));
    CHECK(fs::exists(fs::path(out) / "frame_0001_disparity.csv"));
    CHECK(!fs::exists(fs::path(out) / "frame_0001_trace.csv"));  // trace starts at frame 2
    CHECK(fs::exists(fs::path(out) / "frame_0002_trace.csv"));
    CHECK(fs::exists(fs::path(out) / "frame_0003_trace.csv"));

    // Identical bundles: frames 2 and 3 trace output match byte for byte.
    CHECK(slurp(fs::path(out) / "frame_0002_trace.csv") ==
          slurp(fs::path(out) / "frame_0003_trace.csv"));

    const std::string text = slurp(log);
    CHECK(text.find("model fps: 162 (binocular @100MHz)") != std::string::npos);

    // Missing frame file: the error names the frame and the path.
    {
        std::ofstream manifest(dir.path / "bad.txt");
        manifest << "l.pgm nothere.pgm\n";
    }
    const std::string bad_log = (dir.path / "bad.log").string();
    const std::string bad_cmd = std::string(BIFEAT_CLI_PATH) + " run " +
                                (dir.path / "bad.txt").string() + " --out " + out + " > " +
                                bad_log + " 2>&1";
    CHECK(WEXITSTATUS(std::system(bad_cmd.c_str())) == 1);
    const std::string bad_text = slurp(bad_log);
    CHECK(bad_text.find("frame 1") != std::string::npos);
    CHECK(bad_text.find("nothere.pgm") != std::string::npos);
}

TEST_CASE("cli gen-pattern and eval") {
    TempDir dir("bifeat_cli_eval");
    const std::string pattern_path = (dir.path / "pat.txt").string();
    REQUIRE(run_cli("gen-pattern --seed 42 --out " + pattern_path) == 0);
    const SamplePattern pattern = read_pattern_file(pattern_path);
    CHECK(pattern == gen_pattern(42));
    // 1 header + 128 data lines.
    std::ifstream in(pattern_path);
    int lines = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 129);

    const GrayImage img = blob_image(240, 180, 60, 5);
    const auto feats = extract_features(img, 500, gen_pattern(kDefaultPatternSeed));
    const std::string rec = (dir.path / "a.bin").string();
    write_descriptor_records(rec, feats.descriptors);
    const std::string h_path = (dir.path / "h.txt").string();
    {
        std::ofstream h(h_path);
        h << "1 0 0 0 1 0 0 0 1\n";
    }
    const std::string out = (dir.path / "out").string();
    REQUIRE(run_cli("eval " + rec + " " + rec + " " + h_path + " --out " + out) == 0);
    const std::string curve_text = slurp(fs::path(out) / "curve.csv");
    CHECK(curve_text.find("threshold,recall,one_minus_precision\n") == 0);
    CHECK(curve_text.find("\n128,1,") != std::string::npos);  // self-eval: final recall 1

    // Byte-for-byte wrapper equivalence with the library curve.
    std::vector<int> thresholds;
    for (int t = 0; t <= 128; t += 8) thresholds.push_back(t);
    const auto curve = recall_precision_curve(feats.descriptors, feats.descriptors,
                                              Homography::identity(), 3.0, thresholds);
    std::ostringstream curve_expect;
    write_curve_csv(curve_expect, curve);
    CHECK(curve_text == curve_expect.str());

    // Disjoint coordinates: no correspondences, explicit nonzero exit.
    std::vector<Descriptor> far(2);
    far[0].coord = pack_coord(900, 900);
    far[1].coord = pack_coord(901, 901);
    const std::string far_rec = (dir.path / "far.bin").string();
    write_descriptor_records(far_rec, far);
    CHECK(run_cli("eval " + rec + " " + far_rec + " " + h_path + " --out " + out) == 1);
}
