#include "bifeat/matcher.hpp"

#include <cstdlib>
#include <stdexcept>

namespace bifeat {

void MatchConfig::validate() const {
    if (hamming_threshold <= 0 || hamming_threshold > kDescriptorBits)
        throw std::invalid_argument("MatchConfig: hamming_threshold must be in 1..128");
    if (epipolar_epsilon < 0) throw std::invalid_argument("MatchConfig: epsilon must be >= 0");
    if (max_disparity <= 0) throw std::invalid_argument("MatchConfig: max_disparity must be > 0");
    if (cores_per_group < 1) throw std::invalid_argument("MatchConfig: cores_per_group must be >= 1");
}

std::vector<CoreResult> match_batch(std::span<const Descriptor> refs,
                                    std::span<const Descriptor> candidates) {
    if (candidates.empty()) throw std::invalid_argument("match_batch: empty candidate stream");
    std::vector<CoreResult> best(refs.size());
    for (std::size_t r = 0; r < refs.size(); ++r) {
        best[r] = {0, hamming(refs[r], candidates[0])};
        for (std::size_t c = 1; c < candidates.size(); ++c) {
            // Update only on strictly smaller distance: first occurrence wins ties.
            const int d = hamming(refs[r], candidates[c]);
            if (d < best[r].distance) best[r] = {c, d};
        }
    }
    return best;
}

namespace {

template <typename Keep>
std::vector<MatchPair> run_batches(const std::vector<Descriptor>& refs,
                                   const std::vector<Descriptor>& candidates,
                                   const MatchConfig& cfg, MatchKind kind, Keep keep) {
    cfg.validate();
    std::vector<MatchPair> out;
    if (refs.empty() || candidates.empty()) return out;
    const std::size_t group = static_cast<std::size_t>(cfg.cores_per_group);
    for (std::size_t start = 0; start < refs.size(); start += group) {
        const std::size_t n = std::min(group, refs.size() - start);
        const auto results =
            match_batch(std::span(refs).subspan(start, n), std::span(candidates));
        for (std::size_t r = 0; r < n; ++r) {
            if (results[r].distance > cfg.hamming_threshold) continue;
            const Descriptor& a = refs[start + r];
            const Descriptor& b = candidates[results[r].best_index];
            MatchPair pair{a.x(), a.y(), b.x(), b.y(), results[r].distance, kind, 0};
            if (keep(pair)) out.push_back(pair);
        }
    }
    return out;
}

}  // namespace

std::vector<MatchPair> trace_match(const std::vector<Descriptor>& prev_left,
                                   const std::vector<Descriptor>& cur_left,
                                   const MatchConfig& cfg) {
    return run_batches(cur_left, prev_left, cfg, MatchKind::trace, [](MatchPair&) { return true; });
}

std::vector<MatchPair> stereo_match(const std::vector<Descriptor>& cur_left,
                                    const std::vector<Descriptor>& cur_right,
                                    const MatchConfig& cfg) {
    return run_batches(cur_left, cur_right, cfg, MatchKind::stereo, [&cfg](MatchPair& pair) {
        if (std::abs(pair.ay - pair.by) > cfg.epipolar_epsilon) return false;
        const int disparity = pair.ax - pair.bx;
        if (disparity < 0 || disparity > cfg.max_disparity) return false;
        pair.disparity = disparity;
        return true;
    });
}

void write_matches_csv(std::ostream& out, std::span<const MatchPair> pairs) {
    out << "kind,xa,ya,xb,yb,distance,disparity\n";
    for (const MatchPair& p : pairs) {
        out << (p.kind == MatchKind::trace ? "trace" : "stereo") << ',' << p.ax << ',' << p.ay << ','
            << p.bx << ',' << p.by << ',' << p.distance << ',';
        if (p.kind == MatchKind::stereo) out << p.disparity;
        out << '\n';
    }
}

}  // namespace bifeat
