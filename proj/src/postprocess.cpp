#include "polarmask/postprocess.hpp"

#include "polarmask/error.hpp"
#include "polarmask/losses.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace polarmask {

namespace {

// Descending score, then ascending input index.
bool ranks_before(const Candidate& a, double score_a, const Candidate& b, double score_b) {
    if (score_a != score_b) return score_a > score_b;
    return a.index < b.index;
}

std::vector<Candidate> sorted_by_score(std::vector<Candidate> cands) {
    std::vector<std::pair<double, Candidate>> scored;
    scored.reserve(cands.size());
    for (auto& c : cands) {
        const double s = c.score();
        scored.emplace_back(s, std::move(c));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return ranks_before(a.second, a.first, b.second, b.first);
    });
    std::vector<Candidate> out;
    out.reserve(scored.size());
    for (auto& [s, c] : scored) out.push_back(std::move(c));
    return out;
}

}  // namespace

double Candidate::score() const { return fused_score(class_score, centerness); }

void NmsConfig::validate() const {
    if (!(score_threshold >= 0.0 && score_threshold <= 1.0) ||
        !(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "thresholds must lie in [0, 1]");
    }
    if (top_k_per_level < 1) throw Error(ErrorKind::InvalidArgument, "top_k_per_level must be >= 1");
}

void renumber(std::vector<Candidate>& cands) {
    for (std::size_t i = 0; i < cands.size(); ++i) cands[i].index = i;
}

std::vector<Candidate> select_candidates(const std::vector<Candidate>& cands, const NmsConfig& cfg) {
    cfg.validate();
    std::map<int, std::vector<Candidate>> by_level;
    for (const auto& c : cands) {
        if (c.score() >= cfg.score_threshold) by_level[c.level].push_back(c);
    }
    std::vector<Candidate> merged;
    for (auto& [level, group] : by_level) {
        auto ranked = sorted_by_score(std::move(group));
        if (ranked.size() > static_cast<std::size_t>(cfg.top_k_per_level)) {
            ranked.erase(ranked.begin() + cfg.top_k_per_level, ranked.end());
        }
        for (auto& c : ranked) merged.push_back(std::move(c));
    }
    return sorted_by_score(std::move(merged));
}

Box mask_bbox(const PolarInstance& p) { return bounding_box(decode_points(p)); }

std::vector<Candidate> nms(const std::vector<Candidate>& cands, const NmsConfig& cfg) {
    cfg.validate();
    const auto ranked = sorted_by_score(cands);
    std::vector<Box> boxes;
    boxes.reserve(ranked.size());
    for (const auto& c : ranked) boxes.push_back(mask_bbox(c.instance));

    std::vector<bool> suppressed(ranked.size(), false);
    std::vector<Candidate> kept;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (suppressed[i]) continue;
        kept.push_back(ranked[i]);
        for (std::size_t j = i + 1; j < ranked.size(); ++j) {
            if (suppressed[j] || ranked[j].category != ranked[i].category) continue;
            double iou = 0.0;
            try {
                iou = box_iou(boxes[i], boxes[j]);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::BothEmpty) throw;
                iou = 1.0;  // two identical point-sized boxes are duplicates
            }
            if (iou > cfg.iou_threshold) suppressed[j] = true;
        }
    }
    return kept;
}

std::vector<AssembledMask> assemble(const std::vector<Candidate>& cands, const NmsConfig& cfg,
                                    RasterSize raster) {
    std::vector<AssembledMask> out;
    for (auto& c : nms(select_candidates(cands, cfg), cfg)) {
        const auto pts = decode_points(c.instance);
        BitMask mask(raster.width, raster.height);
        if (std::abs(signed_area(pts)) >= Contour::kMinArea) {
            mask = rasterize(Contour(pts), raster.width, raster.height);
        }
        out.push_back({std::move(c), std::move(mask)});
    }
    return out;
}

}  // namespace polarmask
