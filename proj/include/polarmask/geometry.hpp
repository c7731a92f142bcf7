#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace polarmask {

/// Image coordinates: origin top-left, x to the right, y downward.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }

struct Box {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Closed polygon with at least three points and nonzero area.
///
/// Construction validates the points and normalizes orientation so the
/// shoelace signed area is positive, i.e. vertices advance in the same
/// rotational sense as increasing polar angle (from +x toward +y).
class Contour {
public:
    static constexpr double kMinArea = 1e-9;

    explicit Contour(std::vector<Point> points);

    std::span<const Point> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    const Point& operator[](std::size_t i) const { return points_[i]; }
    bool closed() const { return true; }

    Contour translated(Point offset) const;

private:
    std::vector<Point> points_;
};

/// Row-major binary occupancy grid.
class BitMask {
public:
    BitMask(int width, int height);
    BitMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int row, int col) const { return bits_[index(row, col)] != 0; }
    void set(int row, int col, bool value = true) { bits_[index(row, col)] = value ? 1 : 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::span<const std::uint8_t> bits() const { return bits_; }

    friend bool operator==(const BitMask&, const BitMask&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

// Shoelace signed area of an open point list treated as closed (no validation).
double signed_area(std::span<const Point> points);

double polygon_area(const Contour& c);

/// Area centroid of the polygon. May fall outside non-convex shapes.
Point mass_center(const Contour& c);

/// Mean of set-pixel centers, the bitmap form of the mass center.
Point mask_mass_center(const BitMask& m);

Box bounding_box(const Contour& c);
Box bounding_box(std::span<const Point> points);
Point box_center(const Contour& c);

/// Even-odd test; points exactly on an edge follow the half-open crossing rule.
bool point_in_polygon(Point p, std::span<const Point> polygon);
bool point_in_polygon(Point p, const Contour& c);

bool is_convex(const Contour& c);

/// Pixel (row, col) is set iff its center (col + 0.5, row + 0.5) lies inside
/// the polygon under the even-odd rule. The result may be empty when the
/// contour does not cover any pixel center of the raster.
BitMask rasterize(const Contour& c, int width, int height);

/// rasterize() that throws EmptyRaster instead of returning an all-zero mask.
BitMask rasterize_instance(const Contour& c, int width, int height);

/// Outer boundary of the largest 8-connected component.
///
/// The boundary follows pixel edges (crack boundary), so rasterizing the
/// returned contour reproduces the component with its holes filled. Regions
/// whose pixel centers span no area (a single pixel, a one-pixel-wide line)
/// are rejected as degenerate.
Contour extract_contour(const BitMask& m);

double pixel_iou(const BitMask& a, const BitMask& b);
double box_iou(const Box& a, const Box& b);

}  // namespace polarmask
