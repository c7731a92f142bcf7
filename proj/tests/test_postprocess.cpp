#include "polarmask/error.hpp"
#include "polarmask/postprocess.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace polarmask {
namespace {

// Four rays decode to a diamond whose bounding box is exactly `b` (the center
// must lie inside b).
Candidate box_candidate(const Box& b, double score, int category = 0, int level = 0) {
    const Point c{0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max)};
    PolarInstance inst(c, AngleGrid(4), {b.x_max - c.x, b.y_max - c.y, c.x - b.x_min, c.y - b.y_min});
    return Candidate{std::move(inst), score, 1.0, level, category, 0};
}

std::vector<std::size_t> indices(const std::vector<Candidate>& cs) {
    std::vector<std::size_t> out;
    for (const auto& c : cs) out.push_back(c.index);
    return out;
}

TEST(Candidate, ScoreIsFused) {
    auto c = box_candidate({0, 0, 2, 2}, 0.8);
    c.centerness = 0.5;
    EXPECT_DOUBLE_EQ(c.score(), 0.4);
}

TEST(NmsConfig, Validation) {
    EXPECT_NO_THROW(NmsConfig{}.validate());
    EXPECT_THROW((NmsConfig{1.5, 10, 0.5}.validate()), Error);
    EXPECT_THROW((NmsConfig{0.05, 0, 0.5}.validate()), Error);
    EXPECT_THROW((NmsConfig{0.05, 10, -0.1}.validate()), Error);
}

// ----------------------------------------------------------------------------
// select_candidates

TEST(SelectCandidates, AllBelowThresholdIsEmpty) {
    std::vector<Candidate> cs;
    for (int i = 0; i < 5; ++i) cs.push_back(box_candidate({0, 0, 4, 4}, 0.01 * i));
    renumber(cs);
    EXPECT_TRUE(select_candidates(cs).empty());
}

TEST(SelectCandidates, TopKPerLevel) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<Candidate> cs;
    for (int i = 0; i < 1500; ++i) cs.push_back(box_candidate({0, 0, 4, 4}, u(rng)));
    renumber(cs);
    const auto out = select_candidates(cs);
    ASSERT_EQ(out.size(), 1000u);
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_GE(out[i - 1].score(), out[i].score());

    // The cut keeps exactly the 1000 highest scores.
    std::vector<double> scores;
    for (const auto& c : cs) scores.push_back(c.score());
    std::sort(scores.rbegin(), scores.rend());
    EXPECT_EQ(out.back().score(), scores[999]);
}

TEST(SelectCandidates, LevelsAreCappedSeparately) {
    std::vector<Candidate> cs;
    for (int level = 0; level < 3; ++level) {
        for (int i = 0; i < 7; ++i) cs.push_back(box_candidate({0, 0, 4, 4}, 0.1 + 0.1 * i, 0, level));
    }
    renumber(cs);
    const auto out = select_candidates(cs, {0.05, 5, 0.5});
    EXPECT_EQ(out.size(), 15u);
    for (int level = 0; level < 3; ++level) {
        EXPECT_EQ(std::count_if(out.begin(), out.end(), [&](const Candidate& c) { return c.level == level; }), 5);
    }
}

TEST(SelectCandidates, EqualScoresKeepInputOrder) {
    std::vector<Candidate> cs{box_candidate({0, 0, 4, 4}, 0.3), box_candidate({10, 10, 14, 14}, 0.7),
                              box_candidate({20, 20, 24, 24}, 0.3)};
    renumber(cs);
    EXPECT_EQ(indices(select_candidates(cs)), (std::vector<std::size_t>{1, 0, 2}));
}

// ----------------------------------------------------------------------------
// mask_bbox

TEST(MaskBbox, Examples) {
    EXPECT_EQ(mask_bbox(PolarInstance({0, 0}, AngleGrid(4), {1, 2, 1, 2})), (Box{-1, -2, 1, 2}));
    const Box b = mask_bbox(PolarInstance({5, 5}, AngleGrid(36), std::vector<double>(36, 3.0)));
    EXPECT_NEAR(b.x_min, 2.0, 1e-12);
    EXPECT_NEAR(b.y_min, 2.0, 1e-12);
    EXPECT_NEAR(b.x_max, 8.0, 1e-12);
    EXPECT_NEAR(b.y_max, 8.0, 1e-12);
}

TEST(MaskBbox, DecodedSquareMatchesContourBox) {
    const Contour sq({{10, 10}, {30, 10}, {30, 30}, {10, 30}});
    const auto p = encode_raycast(sq, mass_center(sq), AngleGrid(360));
    const Box b = mask_bbox(p);
    const Box want = bounding_box(sq);
    EXPECT_NEAR(b.x_min, want.x_min, 1e-9);
    EXPECT_NEAR(b.y_min, want.y_min, 1e-9);
    EXPECT_NEAR(b.x_max, want.x_max, 1e-9);
    EXPECT_NEAR(b.y_max, want.y_max, 1e-9);
}

// ----------------------------------------------------------------------------
// nms

TEST(Nms, DuplicateKeepsHigherScore) {
    std::vector<Candidate> cs{box_candidate({0, 0, 10, 10}, 0.8), box_candidate({0, 0, 10, 10}, 0.9)};
    renumber(cs);
    const auto out = nms(cs);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].class_score, 0.9);
}

TEST(Nms, DisjointBothKept) {
    std::vector<Candidate> cs{box_candidate({0, 0, 10, 10}, 0.8), box_candidate({20, 20, 30, 30}, 0.9)};
    renumber(cs);
    EXPECT_EQ(nms(cs).size(), 2u);
}

TEST(Nms, SuppressedCandidatesDoNotSuppress) {
    // IoU(A,B) = IoU(B,C) = 7/13 > 0.5 and IoU(A,C) = 1/4: B falls to A, and
    // C survives because B is already gone.
    std::vector<Candidate> cs{box_candidate({0, 0, 10, 1}, 0.9), box_candidate({3, 0, 13, 1}, 0.8),
                              box_candidate({6, 0, 16, 1}, 0.7)};
    renumber(cs);
    EXPECT_NEAR(box_iou(mask_bbox(cs[0].instance), mask_bbox(cs[1].instance)), 7.0 / 13.0, 1e-12);
    EXPECT_NEAR(box_iou(mask_bbox(cs[0].instance), mask_bbox(cs[2].instance)), 0.25, 1e-12);
    EXPECT_EQ(indices(nms(cs)), (std::vector<std::size_t>{0, 2}));
}

TEST(Nms, ClassAware) {
    std::vector<Candidate> cs{box_candidate({0, 0, 10, 10}, 0.9, 0), box_candidate({0, 0, 10, 10}, 0.8, 1)};
    renumber(cs);
    EXPECT_EQ(nms(cs).size(), 2u);
}

TEST(Nms, ScoreTieGoesToLowerIndex) {
    std::vector<Candidate> cs{box_candidate({0, 0, 10, 10}, 0.5), box_candidate({0, 0, 10, 10}, 0.5)};
    renumber(cs);
    EXPECT_EQ(indices(nms(cs)), (std::vector<std::size_t>{0}));
}

std::vector<Candidate> random_candidates(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> pos(0.0, 100.0);
    std::uniform_real_distribution<double> size(2.0, 30.0);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::uniform_int_distribution<int> cat(0, 2);
    std::vector<Candidate> cs;
    for (int i = 0; i < count; ++i) {
        const double x = pos(rng);
        const double y = pos(rng);
        cs.push_back(box_candidate({x, y, x + size(rng), y + size(rng)}, score(rng), cat(rng)));
    }
    renumber(cs);
    return cs;
}

TEST(Nms, KeptPairsBelowThresholdAndSubsetOfInput) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto cs = random_candidates(rng, 200);
        const auto out = nms(cs);
        for (std::size_t i = 0; i < out.size(); ++i) {
            ASSERT_LT(out[i].index, cs.size());
            EXPECT_EQ(out[i].class_score, cs[out[i].index].class_score);
            if (i > 0) EXPECT_GE(out[i - 1].score(), out[i].score());
            for (std::size_t j = i + 1; j < out.size(); ++j) {
                if (out[i].category != out[j].category) continue;
                EXPECT_LE(box_iou(mask_bbox(out[i].instance), mask_bbox(out[j].instance)), 0.5);
            }
        }
    }
}

TEST(Nms, PermutationInvariant) {
    std::mt19937_64 rng(5);
    const auto cs = random_candidates(rng, 150);
    const auto want = indices(nms(cs));
    for (int trial = 0; trial < 10; ++trial) {
        auto shuffled = cs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto got = indices(nms(shuffled));
        EXPECT_EQ(got, want);
    }
}

// ----------------------------------------------------------------------------
// assemble

TEST(Assemble, SingleCandidate) {
    std::vector<Candidate> cs{box_candidate({4, 6, 20, 18}, 0.9)};
    renumber(cs);
    const auto out = assemble(cs, {}, {32, 32});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].mask, rasterize(decode(cs[0].instance), 32, 32));
    EXPECT_EQ(out[0].candidate.index, 0u);
}

TEST(Assemble, DuplicatedListMatchesOriginal) {
    std::mt19937_64 rng(7);
    auto cs = random_candidates(rng, 40);
    const auto once = assemble(cs, {}, {128, 128});
    auto twice = cs;
    twice.insert(twice.end(), cs.begin(), cs.end());
    renumber(twice);
    const auto out = assemble(twice, {}, {128, 128});
    ASSERT_EQ(out.size(), once.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        EXPECT_EQ(out[i].candidate.index, once[i].candidate.index);
        EXPECT_EQ(out[i].mask, once[i].mask);
    }
}

TEST(Assemble, EmptyInput) { EXPECT_TRUE(assemble({}, {}, {16, 16}).empty()); }

TEST(Assemble, Deterministic) {
    std::mt19937_64 rng(9);
    const auto cs = random_candidates(rng, 60);
    const auto a = assemble(cs, {}, {128, 128});
    const auto b = assemble(cs, {}, {128, 128});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].mask, b[i].mask);
}

}  // namespace
}  // namespace polarmask
