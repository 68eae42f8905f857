#include "bifeat/detector.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace bifeat {

int lobe_for_sigma(double sigma) {
    // Nearest odd lobe to 3*sigma/1.2, ties rounding up: 1.2 -> 3, 2.0 -> 5,
    // ..., 6.0 -> 15, 6.4 -> 17.
    if (!(sigma > 0.0)) throw std::invalid_argument("lobe_for_sigma: sigma must be positive");
    return 2 * static_cast<int>(std::floor(1.25 * sigma + 1e-9)) + 1;
}

namespace {

ScaleLevel make_level(double sigma) {
    ScaleLevel level;
    level.sigma = sigma;
    level.lobe = lobe_for_sigma(sigma);
    level.side = 3 * level.lobe;
    level.margin = (level.side - 1) / 2;
    const std::int64_t side = level.side;
    level.norm4 = side * side * side * side;
    return level;
}

}  // namespace

ScaleTable ScaleTable::default_table() {
    return from_sigmas({1.2, 2.0, 2.8, 3.6, 4.4, 5.2, 6.0, 6.4});
}

ScaleTable ScaleTable::from_sigmas(const std::array<double, kScaleCount>& sigmas) {
    ScaleTable table;
    for (int i = 0; i < kScaleCount; ++i) {
        if (i > 0 && !(sigmas[i] > sigmas[i - 1]))
            throw std::invalid_argument("ScaleTable: sigmas must be strictly increasing");
        table.levels[i] = make_level(sigmas[i]);
        if (table.levels[i].side < 9 || table.levels[i].side % 2 == 0)
            throw std::invalid_argument("ScaleTable: filter side must be odd and >= 9");
    }
    return table;
}

BoxResponses box_responses(const IntegralImage& ii, const ScaleLevel& level, int x, int y) {
    const int l = level.lobe;
    const int half = (3 * l - 1) / 2;
    if (x < level.margin || y < level.margin || x >= ii.width - level.margin ||
        y >= ii.height - level.margin)
        throw std::out_of_range("box_responses: (" + std::to_string(x) + "," + std::to_string(y) +
                                ") violates margin " + std::to_string(level.margin));

    BoxResponses r;
    // Dxx: full (3l)x(2l-1) box minus 3x the centered l-wide stripe.
    r.dxx = box_sum(ii, {x - half, y - (l - 1), x + half, y + (l - 1)}) -
            3 * box_sum(ii, {x - (l - 1) / 2, y - (l - 1), x + (l - 1) / 2, y + (l - 1)});
    r.dyy = box_sum(ii, {x - (l - 1), y - half, x + (l - 1), y + half}) -
            3 * box_sum(ii, {x - (l - 1), y - (l - 1) / 2, x + (l - 1), y + (l - 1) / 2});
    // Dxy: +top-right, +bottom-left, -top-left, -bottom-right quadrants.
    r.dxy = box_sum(ii, {x + 1, y - l, x + l, y - 1}) + box_sum(ii, {x - l, y + 1, x - 1, y + l}) -
            box_sum(ii, {x - l, y - l, x - 1, y - 1}) - box_sum(ii, {x + 1, y + 1, x + l, y + l});
    return r;
}

std::int64_t hessian_response(const IntegralImage& ii, const ScaleTable& table, int x, int y,
                              int scale_index) {
    const BoxResponses r = box_responses(ii, table.levels.at(scale_index), x, y);
    return hessian_det100(r.dxx, r.dyy, r.dxy);
}

ResponseStack::ResponseStack(int w, int h, const ScaleTable& table) : width(w), height(h) {
    for (int s = 0; s < kScaleCount; ++s) {
        margins[s] = table.levels[s].margin;
        norms[s] = table.levels[s].norm4;
    }
    planes.assign(static_cast<std::size_t>(kScaleCount) * w * h, 0);
}

ResponseStack build_response_stack(const IntegralImage& ii, const ScaleTable& table) {
    const int need = 2 * table.max_margin() + 1;
    if (ii.width < need || ii.height < need)
        throw std::invalid_argument("build_response_stack: image " + std::to_string(ii.width) + "x" +
                                    std::to_string(ii.height) + " smaller than " +
                                    std::to_string(need) + "x" + std::to_string(need));

    ResponseStack stack(ii.width, ii.height, table);

    auto fill_plane = [&](int s) {
        const ScaleLevel& level = table.levels[s];
        const int m = level.margin;
        for (int y = m; y < ii.height - m; ++y)
            for (int x = m; x < ii.width - m; ++x) {
                const BoxResponses r = box_responses(ii, level, x, y);
                stack.at(s, x, y) = hessian_det100(r.dxx, r.dyy, r.dxy);
            }
    };

    // One task per scale, mirroring the eight parallel response cores.
    unsigned workers = std::min<unsigned>(kScaleCount, std::thread::hardware_concurrency());
    if (workers <= 1) {
        for (int s = 0; s < kScaleCount; ++s) fill_plane(s);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (int s = static_cast<int>(t); s < kScaleCount; s += static_cast<int>(workers))
                    fill_plane(s);
            });
        for (auto& th : pool) th.join();
    }
    return stack;
}

std::vector<Keypoint> nms(const ResponseStack& stack, std::int64_t threshold) {
    std::vector<Keypoint> out;
    // y,x outer then scale keeps the output sorted without an extra pass.
    for (int y = 0; y < stack.height; ++y) {
        for (int x = 0; x < stack.width; ++x) {
            for (int s = 1; s + 1 < kScaleCount; ++s) {
                if (!stack.valid(s - 1, x, y) || !stack.valid(s, x, y) || !stack.valid(s + 1, x, y))
                    continue;
                const std::int64_t v = stack.at(s, x, y);
                // v / norm_s > threshold, kept exact by cross-multiplying.
                if (static_cast<__int128>(v) <= static_cast<__int128>(threshold) * stack.norms[s])
                    continue;
                bool is_max = true;
                for (int ds = -1; ds <= 1 && is_max; ++ds)
                    for (int dy = -1; dy <= 1 && is_max; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            if (ds == 0 && dy == 0 && dx == 0) continue;
                            if (!stack.valid(s + ds, x + dx, y + dy)) continue;
                            // Strict v / norm_s > n / norm_t, exact.
                            if (static_cast<__int128>(stack.at(s + ds, x + dx, y + dy)) *
                                    stack.norms[s] >=
                                static_cast<__int128>(v) * stack.norms[s + ds]) {
                                is_max = false;
                                break;
                            }
                        }
                if (is_max) out.push_back({x, y, s, v});
            }
        }
    }
    return out;
}

std::vector<Keypoint> detect(const GrayImage& img, std::int64_t threshold, const ScaleTable& table) {
    return nms(build_response_stack(compute_integral(img), table), threshold);
}

void write_keypoints_csv(std::ostream& out, const std::vector<Keypoint>& keypoints) {
    out << "x,y,scale_index,score\n";
    for (const Keypoint& kp : keypoints)
        out << kp.x << ',' << kp.y << ',' << kp.scale_index << ',' << kp.score << '\n';
}

}  // namespace bifeat
