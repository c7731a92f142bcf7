#pragma once

#include "polarmask/geometry.hpp"

#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace polarmask {

/// n rays at angles i * 2pi/n, starting at 0 (the +x axis) and rotating toward +y.
class AngleGrid {
public:
    explicit AngleGrid(int n);

    int size() const { return n_; }
    double delta() const { return 2.0 * std::numbers::pi / n_; }
    double angle(int i) const { return i * delta(); }
    std::vector<double> angles() const;

    friend bool operator==(const AngleGrid&, const AngleGrid&) = default;

private:
    int n_;
};

enum class CenterMode { Mass, Box, Explicit };

struct CodecConfig {
    static constexpr double kDefaultEpsilon = 1e-6;

    double epsilon = kDefaultEpsilon;
    /// Fallback search radius around a grid angle; defaults to half the grid step.
    std::optional<double> angle_match_tolerance;
    CenterMode center_mode = CenterMode::Mass;
    /// Used when center_mode is Explicit.
    Point explicit_center{};
    /// Traversal encoder: maximum spacing between consecutive contour samples (px).
    double max_point_spacing = 0.5;
    /// Traversal encoder: a contour sample "hits" a grid angle when its angle is
    /// within this distance (one degree bins, as in integer-degree labelling).
    double hit_window = std::numbers::pi / 360.0;

    double tolerance_for(const AngleGrid& grid) const;
    void validate(const AngleGrid& grid) const;
};

/// One center plus a ray length per grid angle.
class PolarInstance {
public:
    PolarInstance(Point center, AngleGrid grid, std::vector<double> rays,
                  double epsilon = CodecConfig::kDefaultEpsilon);

    const Point& center() const { return center_; }
    const AngleGrid& grid() const { return grid_; }
    std::span<const double> rays() const { return rays_; }

private:
    Point center_;
    AngleGrid grid_;
    std::vector<double> rays_;
};

Point instance_center(const Contour& c, const CodecConfig& cfg);

/// Distances along the half-line from origin at the given angle to every
/// contour crossing, ascending. Each segment is half-open [a, b) so a shared
/// vertex is reported once.
std::vector<double> ray_intersections(const Contour& c, Point origin, double angle);

/// Distance label generation by walking contour samples and binning their
/// polar angles, with maximum-distance selection, nearest-angle fallback and
/// epsilon for angles the contour never reaches.
PolarInstance encode_traversal(const Contour& c, Point center, const AngleGrid& grid,
                               const CodecConfig& cfg = {});

/// Exact ray/segment intersection encoder; the farthest crossing wins.
PolarInstance encode_raycast(const Contour& c, Point center, const AngleGrid& grid,
                             const CodecConfig& cfg = {});

/// Point i = center + d_i (cos theta_i, sin theta_i), in grid order.
Contour decode(const PolarInstance& p);
std::vector<Point> decode_points(const PolarInstance& p);

struct RasterSize {
    int height = 0;
    int width = 0;
};

/// IoU between the rasterized contour and its raycast encode/decode reconstruction.
double reconstruction_iou(const Contour& c, const AngleGrid& grid, const CodecConfig& cfg,
                          RasterSize raster);

}  // namespace polarmask
