#pragma once

#include "polarmask/geometry.hpp"
#include "polarmask/polar_codec.hpp"

#include <utility>
#include <vector>

namespace polarmask {

/// One detection hypothesis. `level` groups candidates the way pyramid levels
/// would; `index` is the position in the original input and breaks score ties.
struct Candidate {
    PolarInstance instance;
    double class_score = 0.0;
    double centerness = 1.0;
    int level = 0;
    int category = 0;
    std::size_t index = 0;

    double score() const;
};

struct NmsConfig {
    double score_threshold = 0.05;
    int top_k_per_level = 1000;
    double iou_threshold = 0.5;

    void validate() const;
};

/// Per level: drop fused scores below the threshold, keep the top k; then merge
/// levels in descending fused score (lower index first on ties).
std::vector<Candidate> select_candidates(const std::vector<Candidate>& cands, const NmsConfig& cfg = {});

/// Smallest axis-aligned box around the decoded contour.
Box mask_bbox(const PolarInstance& p);

/// Greedy class-aware NMS on mask boxes. Output is in descending fused score.
std::vector<Candidate> nms(const std::vector<Candidate>& cands, const NmsConfig& cfg = {});

struct AssembledMask {
    Candidate candidate;
    BitMask mask;
};

/// select_candidates -> nms -> decode -> rasterize.
std::vector<AssembledMask> assemble(const std::vector<Candidate>& cands, const NmsConfig& cfg,
                                    RasterSize raster);

/// Assigns index = position, the convention select_candidates and nms rely on.
void renumber(std::vector<Candidate>& cands);

}  // namespace polarmask
