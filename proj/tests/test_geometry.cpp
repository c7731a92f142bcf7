#include "polarmask/error.hpp"
#include "polarmask/geometry.hpp"
#include "support/oracles.hpp"
#include "support/shapes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace polarmask {
namespace {

using testing::brute_raster;
using testing::regular_polygon;

Contour square(double x0, double y0, double x1, double y1) {
    return Contour({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::InvalidArgument;
}

std::vector<Point> random_convex(std::mt19937_64& rng, double min_area) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const int n = 3 + static_cast<int>(u(rng) * 10);
        const double r = 6.0 + 40.0 * u(rng);
        const Point c{50.0 + 20.0 * u(rng), 50.0 + 20.0 * u(rng)};
        std::vector<double> angles;
        for (int i = 0; i < n; ++i) angles.push_back(2.0 * std::numbers::pi * u(rng));
        std::sort(angles.begin(), angles.end());
        std::vector<Point> pts;
        for (double t : angles) pts.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
        // Points on a circle in angle order form a convex polygon.
        if (std::abs(signed_area(pts)) >= min_area) return pts;
    }
}

// ----------------------------------------------------------------------------

TEST(Contour, RejectsDegenerateInput) {
    EXPECT_EQ(kind_of([] { Contour({{0, 0}, {1, 1}}); }), ErrorKind::DegenerateContour);
    EXPECT_EQ(kind_of([] { Contour({{0, 0}, {1, 1}, {2, 2}}); }), ErrorKind::DegenerateContour);
    EXPECT_EQ(kind_of([] { Contour({{0, 0}, {1, 0}, {0, NAN}}); }), ErrorKind::DegenerateContour);
}

TEST(Contour, NormalizesOrientationToPositiveArea) {
    const Contour cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    EXPECT_GT(signed_area(cw.points()), 0.0);
    const Contour ccw({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    EXPECT_EQ(ccw[0], (Point{0, 0}));
    EXPECT_EQ(ccw[1], (Point{1, 0}));
}

TEST(PolygonArea, Examples) {
    EXPECT_DOUBLE_EQ(polygon_area(square(0, 0, 1, 1)), 1.0);
    EXPECT_DOUBLE_EQ(polygon_area(Contour({{0, 0}, {2, 0}, {0, 2}})), 2.0);
    // Closed form 18 sin(10 deg) = 3.1256672...
    const double closed_form = testing::regular_polygon_area(36, 1.0);
    EXPECT_NEAR(closed_form, 3.125667198, 1e-9);
    EXPECT_NEAR(polygon_area(Contour(regular_polygon(36, 1.0))), closed_form, 1e-12);
}

TEST(PolygonArea, InvariantUnderRigidMotion) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = random_convex(rng, 1.0);
        const double a0 = polygon_area(Contour(pts));
        const double theta = u(rng);
        const Point t{u(rng), u(rng)};
        std::vector<Point> moved;
        for (const auto& p : pts) {
            moved.push_back({p.x * std::cos(theta) - p.y * std::sin(theta) + t.x,
                             p.x * std::sin(theta) + p.y * std::cos(theta) + t.y});
        }
        EXPECT_NEAR(polygon_area(Contour(moved)), a0, 1e-9 * a0);
    }
}

TEST(MassCenter, Examples) {
    const Point sq = mass_center(square(0, 0, 1, 1));
    EXPECT_NEAR(sq.x, 0.5, 1e-15);
    EXPECT_NEAR(sq.y, 0.5, 1e-15);
    const Point tri = mass_center(Contour({{0, 0}, {3, 0}, {0, 3}}));
    EXPECT_NEAR(tri.x, 1.0, 1e-15);
    EXPECT_NEAR(tri.y, 1.0, 1e-15);
}

TEST(MassCenter, CShapeCenterFallsOutside) {
    const Contour c(testing::c_shape(10.0, 2.0));
    const Point m = mass_center(c);
    // (100 * 5 - 48 * 6) / 52 by subtracting the cut-out rectangle.
    EXPECT_NEAR(m.x, 212.0 / 52.0, 1e-12);
    EXPECT_NEAR(m.y, 5.0, 1e-12);
    EXPECT_FALSE(point_in_polygon(m, c));
    EXPECT_FALSE(testing::winding_inside(m, c.points()));
}

TEST(MassCenter, TranslationEquivariant) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Contour c(random_convex(rng, 1.0));
        const Point t{u(rng), u(rng)};
        const Point a = mass_center(c) + t;
        const Point b = mass_center(c.translated(t));
        EXPECT_NEAR(a.x, b.x, 1e-9);
        EXPECT_NEAR(a.y, b.y, 1e-9);
    }
}

TEST(MassCenter, InsideEveryConvexContour) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const Contour c(random_convex(rng, 1.0));
        EXPECT_TRUE(is_convex(c));
        EXPECT_TRUE(testing::winding_inside(mass_center(c), c.points()));
    }
}

TEST(MassCenter, BitmapFormMatchesPolygonForAlignedRectangle) {
    const BitMask m = rasterize(square(2, 4, 12, 10), 20, 20);
    const Point p = mask_mass_center(m);
    const Point q = mass_center(square(2, 4, 12, 10));
    EXPECT_DOUBLE_EQ(p.x, q.x);
    EXPECT_DOUBLE_EQ(p.y, q.y);
    EXPECT_EQ(kind_of([] { mask_mass_center(BitMask(3, 3)); }), ErrorKind::EmptyMask);
}

TEST(BoxCenter, Examples) {
    EXPECT_EQ(box_center(square(0, 0, 1, 1)), (Point{0.5, 0.5}));
    EXPECT_EQ(box_center(Contour({{0, 0}, {4, 0}, {0, 2}})), (Point{2.0, 1.0}));
    const Contour moon(testing::crescent({0, 0}, 6.0, 10.0, -2.0, 2.0, 40));
    const Point a = box_center(moon);
    const Point b = mass_center(moon);
    EXPECT_GT(std::hypot(a.x - b.x, a.y - b.y), 0.1);
}

// ----------------------------------------------------------------------------

TEST(Rasterize, SquareCountsSixteenPixels) {
    const Contour c = square(0, 0, 4, 4);
    const BitMask m = rasterize(c, 8, 8);
    EXPECT_EQ(m.count(), 16u);
    EXPECT_EQ(m, brute_raster(c.points(), 8, 8));
}

TEST(Rasterize, OutsideRasterIsEmpty) {
    const Contour c = square(100, 100, 110, 110);
    EXPECT_TRUE(rasterize(c, 8, 8).empty());
    EXPECT_EQ(kind_of([&] { rasterize_instance(c, 8, 8); }), ErrorKind::EmptyRaster);
}

TEST(Rasterize, FullFrameSetsEveryPixel) {
    const BitMask m = rasterize(square(0, 0, 13, 7), 13, 7);
    EXPECT_EQ(m.count(), 13u * 7u);
}

TEST(Rasterize, MatchesPointInPolygonLoopOnStarShapes) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const auto shape = testing::random_radial(rng, {40.3, 37.9}, 10.0, 30.0, 0.6);
        const auto pts = shape.polygon(97);
        EXPECT_EQ(rasterize(Contour(pts), 80, 80), brute_raster(pts, 80, 80)) << "trial " << trial;
    }
}

TEST(Rasterize, EvenOddOnSelfOverlap) {
    // Pentagram: the inner pentagon is covered twice and is empty under even-odd.
    std::vector<Point> star;
    for (int k = 0; k < 5; ++k) {
        const double t = -std::numbers::pi / 2 + 4.0 * std::numbers::pi * k / 5;
        star.push_back({50 + 40 * std::cos(t), 50 + 40 * std::sin(t)});
    }
    const BitMask m = rasterize(Contour(star), 100, 100);
    EXPECT_FALSE(m.at(50, 50));
    EXPECT_TRUE(testing::winding_inside({50.5, 50.5}, star));
}

// ----------------------------------------------------------------------------

TEST(ExtractContour, SquareRoundTripKeepsPixelExtent) {
    const BitMask m = rasterize(square(2, 3, 10, 9), 16, 16);
    const Contour c = extract_contour(m);
    EXPECT_EQ(bounding_box(c), (Box{2, 3, 10, 9}));
    EXPECT_DOUBLE_EQ(polygon_area(c), 48.0);
}

TEST(ExtractContour, SinglePixelIsDegenerate) {
    BitMask m(5, 5);
    m.set(2, 2);
    EXPECT_EQ(kind_of([&] { extract_contour(m); }), ErrorKind::DegenerateContour);
    BitMask line(9, 9);
    for (int c = 1; c < 8; ++c) line.set(4, c);
    EXPECT_EQ(kind_of([&] { extract_contour(line); }), ErrorKind::DegenerateContour);
}

TEST(ExtractContour, EmptyMaskIsAnError) {
    EXPECT_EQ(kind_of([] { extract_contour(BitMask(4, 4)); }), ErrorKind::EmptyMask);
}

TEST(ExtractContour, DiskAreaCloseToAnalytic) {
    BitMask disk(64, 64);
    for (int r = 0; r < 64; ++r) {
        for (int c = 0; c < 64; ++c) {
            const double dx = c + 0.5 - 32.0;
            const double dy = r + 0.5 - 32.0;
            if (dx * dx + dy * dy <= 400.0) disk.set(r, c);
        }
    }
    const double analytic = std::numbers::pi * 400.0;
    EXPECT_NEAR(polygon_area(extract_contour(disk)), analytic, 0.05 * analytic);
}

TEST(ExtractContour, PicksLargestComponent) {
    BitMask m(30, 30);
    for (int r = 1; r < 4; ++r)
        for (int c = 1; c < 4; ++c) m.set(r, c);  // 9 pixels
    for (int r = 10; r < 20; ++r)
        for (int c = 12; c < 18; ++c) m.set(r, c);  // 60 pixels
    EXPECT_EQ(bounding_box(extract_contour(m)), (Box{12, 10, 18, 20}));
}

TEST(ExtractContour, DiagonalNeighboursFormOneComponent) {
    BitMask m(10, 10);
    for (int r = 1; r < 4; ++r)
        for (int c = 1; c < 4; ++c) m.set(r, c);
    for (int r = 4; r < 7; ++r)
        for (int c = 4; c < 7; ++c) m.set(r, c);
    const Contour c = extract_contour(m);
    EXPECT_EQ(bounding_box(c), (Box{1, 1, 7, 7}));
    EXPECT_EQ(rasterize(c, 10, 10), m);
}

TEST(ExtractContour, HolesAreFilled) {
    BitMask m(12, 12);
    for (int r = 2; r < 10; ++r)
        for (int c = 2; c < 10; ++c) m.set(r, c, !(r >= 4 && r < 8 && c >= 4 && c < 8));
    const BitMask filled = rasterize(extract_contour(m), 12, 12);
    EXPECT_EQ(filled.count(), 64u);
}

TEST(ExtractContour, RoundTripOfConvexPolygons) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Contour c(random_convex(rng, 100.0));
        const BitMask a = rasterize(c, 128, 128);
        const BitMask b = rasterize(extract_contour(a), 128, 128);
        EXPECT_GE(pixel_iou(a, b), 0.95) << "trial " << trial;
    }
}

// ----------------------------------------------------------------------------

TEST(PixelIou, Examples) {
    const BitMask a = rasterize(square(0, 0, 4, 4), 10, 10);
    EXPECT_DOUBLE_EQ(pixel_iou(a, a), 1.0);
    const BitMask far = rasterize(square(6, 6, 10, 10), 10, 10);
    EXPECT_DOUBLE_EQ(pixel_iou(a, far), 0.0);
    const BitMask half = rasterize(square(2, 0, 6, 4), 10, 10);
    // Overlap 8 px over union 24 px.
    EXPECT_EQ(testing::count_both(a, half), 8u);
    EXPECT_EQ(testing::count_either(a, half), 24u);
    EXPECT_DOUBLE_EQ(pixel_iou(a, half), 1.0 / 3.0);
}

TEST(PixelIou, Errors) {
    EXPECT_EQ(kind_of([] { pixel_iou(BitMask(3, 3), BitMask(3, 4)); }), ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([] { pixel_iou(BitMask(3, 3), BitMask(3, 3)); }), ErrorKind::BothEmpty);
}

TEST(PixelIou, Symmetric) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const BitMask a = rasterize(Contour(random_convex(rng, 10.0)), 120, 120);
        const BitMask b = rasterize(Contour(random_convex(rng, 10.0)), 120, 120);
        EXPECT_EQ(pixel_iou(a, b), pixel_iou(b, a));
    }
}

TEST(BoxIou, Examples) {
    const Box a{0, 0, 2, 2};
    EXPECT_DOUBLE_EQ(box_iou(a, a), 1.0);
    EXPECT_DOUBLE_EQ(box_iou(a, Box{1, 0, 3, 2}), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(box_iou(a, Box{5, 5, 6, 6}), 0.0);
    EXPECT_DOUBLE_EQ(box_iou(Box{1, 1, 1, 1}, a), 0.0);
    EXPECT_EQ(kind_of([] { box_iou(Box{1, 1, 1, 1}, Box{1, 1, 1, 1}); }), ErrorKind::BothEmpty);
}

}  // namespace
}  // namespace polarmask
