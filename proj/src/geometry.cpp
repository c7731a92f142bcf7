#include "polarmask/geometry.hpp"

#include "polarmask/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>

namespace polarmask {

namespace {

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

// -----------------------------------------------------------------------------
// Contour / BitMask
// -----------------------------------------------------------------------------

Contour::Contour(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.size() < 3) {
        throw Error(ErrorKind::DegenerateContour,
                    "contour needs at least 3 points, got " + std::to_string(points_.size()));
    }
    for (const auto& p : points_) {
        if (!finite(p)) throw Error(ErrorKind::DegenerateContour, "non-finite contour point");
    }
    const double a = signed_area(points_);
    if (std::abs(a) < kMinArea) {
        throw Error(ErrorKind::DegenerateContour, "contour area below threshold");
    }
    if (a < 0.0) std::reverse(points_.begin(), points_.end());
}

Contour Contour::translated(Point offset) const {
    std::vector<Point> moved(points_);
    for (auto& p : moved) p = p + offset;
    return Contour(std::move(moved));
}

BitMask::BitMask(int width, int height) : BitMask(width, height, {}) {}

BitMask::BitMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    if (width < 1 || height < 1) {
        throw Error(ErrorKind::InvalidArgument, "mask dimensions must be positive");
    }
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bits_.empty()) {
        bits_.assign(n, 0);
    } else if (bits_.size() != n) {
        throw Error(ErrorKind::DimensionMismatch, "bit count does not match width*height");
    }
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BitMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

// -----------------------------------------------------------------------------
// Area, centers, boxes
// -----------------------------------------------------------------------------

double signed_area(std::span<const Point> points) {
    const std::size_t n = points.size();
    if (n < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = points[i];
        const Point& q = points[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

double polygon_area(const Contour& c) { return std::abs(signed_area(c.points())); }

Point mass_center(const Contour& c) {
    // Accumulate relative to the first vertex to keep the cross products small.
    const auto pts = c.points();
    const Point origin = pts[0];
    const std::size_t n = pts.size();
    double twice_area = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = pts[i] - origin;
        const Point q = pts[(i + 1) % n] - origin;
        const double cross = p.x * q.y - q.x * p.y;
        twice_area += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    if (std::abs(twice_area) < 2.0 * Contour::kMinArea) {
        throw Error(ErrorKind::DegenerateContour, "zero-area contour has no mass center");
    }
    return {origin.x + cx / (3.0 * twice_area), origin.y + cy / (3.0 * twice_area)};
}

Point mask_mass_center(const BitMask& m) {
    double sx = 0.0;
    double sy = 0.0;
    std::size_t n = 0;
    for (int r = 0; r < m.height(); ++r) {
        for (int col = 0; col < m.width(); ++col) {
            if (!m.at(r, col)) continue;
            sx += col + 0.5;
            sy += r + 0.5;
            ++n;
        }
    }
    if (n == 0) throw Error(ErrorKind::EmptyMask, "mask has no set pixels");
    return {sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

Box bounding_box(std::span<const Point> points) {
    if (points.empty()) throw Error(ErrorKind::InvalidArgument, "bounding box of no points");
    Box b{points[0].x, points[0].y, points[0].x, points[0].y};
    for (const auto& p : points) {
        b.x_min = std::min(b.x_min, p.x);
        b.y_min = std::min(b.y_min, p.y);
        b.x_max = std::max(b.x_max, p.x);
        b.y_max = std::max(b.y_max, p.y);
    }
    return b;
}

Box bounding_box(const Contour& c) { return bounding_box(c.points()); }

Point box_center(const Contour& c) {
    const Box b = bounding_box(c);
    return {0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max)};
}

bool point_in_polygon(Point p, std::span<const Point> polygon) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = polygon[i];
        const Point& b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool point_in_polygon(Point p, const Contour& c) { return point_in_polygon(p, c.points()); }

bool is_convex(const Contour& c) {
    const auto pts = c.points();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = pts[(i + 1) % n] - pts[i];
        const Point b = pts[(i + 2) % n] - pts[(i + 1) % n];
        // Orientation is normalized to positive area, so every turn must be >= 0.
        if (a.x * b.y - a.y * b.x < -1e-12) return false;
    }
    return true;
}

// -----------------------------------------------------------------------------
// Rasterization
// -----------------------------------------------------------------------------

BitMask rasterize(const Contour& c, int width, int height) {
    BitMask mask(width, height);
    const auto pts = c.points();
    const std::size_t n = pts.size();
    std::vector<double> xs;
    for (int row = 0; row < height; ++row) {
        const double y = row + 0.5;
        xs.clear();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Point& a = pts[i];
            const Point& b = pts[j];
            if ((a.y > y) != (b.y > y)) {
                xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            // Pixel centers cx with xs[k] <= cx < xs[k+1].
            const double lo = std::ceil(xs[k] - 0.5);
            const double hi = std::ceil(xs[k + 1] - 0.5);
            const int first = static_cast<int>(std::max(lo, 0.0));
            const int last = static_cast<int>(std::min(hi, static_cast<double>(width)));
            for (int col = first; col < last; ++col) mask.set(row, col);
        }
    }
    return mask;
}

BitMask rasterize_instance(const Contour& c, int width, int height) {
    BitMask mask = rasterize(c, width, height);
    if (mask.empty()) {
        throw Error(ErrorKind::EmptyRaster, "contour covers no pixel of the " +
                                                std::to_string(width) + "x" +
                                                std::to_string(height) + " raster");
    }
    return mask;
}

// -----------------------------------------------------------------------------
// Contour extraction
// -----------------------------------------------------------------------------

namespace {

struct PixelIndex {
    int row;
    int col;
};

std::vector<PixelIndex> largest_component(const BitMask& m) {
    const int w = m.width();
    const int h = m.height();
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(w) * h, 0);
    std::vector<PixelIndex> best;
    std::vector<PixelIndex> current;
    std::deque<PixelIndex> queue;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const auto idx = static_cast<std::size_t>(r) * w + c;
            if (!m.at(r, c) || seen[idx]) continue;
            current.clear();
            seen[idx] = 1;
            queue.push_back({r, c});
            while (!queue.empty()) {
                const PixelIndex p = queue.front();
                queue.pop_front();
                current.push_back(p);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = p.row + dr;
                        const int cc = p.col + dc;
                        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                        const auto nidx = static_cast<std::size_t>(rr) * w + cc;
                        if (!m.at(rr, cc) || seen[nidx]) continue;
                        seen[nidx] = 1;
                        queue.push_back({rr, cc});
                    }
                }
            }
            // Strictly larger: ties keep the component found first in raster order.
            if (current.size() > best.size()) best = current;
        }
    }
    return best;
}

struct CrackEdge {
    int x0, y0;
    int dx, dy;
};

std::int64_t vertex_key(int x, int y) {
    return (static_cast<std::int64_t>(y) << 32) | static_cast<std::uint32_t>(x);
}

}  // namespace

Contour extract_contour(const BitMask& m) {
    const std::vector<PixelIndex> comp = largest_component(m);
    if (comp.empty()) throw Error(ErrorKind::EmptyMask, "mask has no set pixels");

    const auto [row_min, row_max] = std::minmax_element(
        comp.begin(), comp.end(), [](auto a, auto b) { return a.row < b.row; });
    const auto [col_min, col_max] = std::minmax_element(
        comp.begin(), comp.end(), [](auto a, auto b) { return a.col < b.col; });
    if (row_min->row == row_max->row || col_min->col == col_max->col) {
        throw Error(ErrorKind::DegenerateContour,
                    "component of " + std::to_string(comp.size()) + " pixel(s) spans no area");
    }

    BitMask only(m.width(), m.height());
    for (const auto& p : comp) only.set(p.row, p.col);
    auto filled = [&](int r, int c) {
        return r >= 0 && r < only.height() && c >= 0 && c < only.width() && only.at(r, c);
    };

    // Directed pixel-edge boundary with the region on the +90 degree side
    // (positive shoelace orientation).
    std::vector<CrackEdge> edges;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> outgoing;
    auto add = [&](int x0, int y0, int dx, int dy) {
        outgoing[vertex_key(x0, y0)].push_back(edges.size());
        edges.push_back({x0, y0, dx, dy});
    };
    for (int r = 0; r < only.height(); ++r) {
        for (int c = 0; c < only.width(); ++c) {
            if (!only.at(r, c)) continue;
            if (!filled(r - 1, c)) add(c, r, 1, 0);
            if (!filled(r, c + 1)) add(c + 1, r, 0, 1);
            if (!filled(r + 1, c)) add(c + 1, r + 1, -1, 0);
            if (!filled(r, c - 1)) add(c, r + 1, 0, -1);
        }
    }

    // The first edge is the top edge of the first pixel in raster order,
    // which always lies on the outer boundary.
    std::vector<std::uint8_t> used(edges.size(), 0);
    std::vector<Point> loop;
    std::size_t e = 0;
    while (!used[e]) {
        used[e] = 1;
        const CrackEdge& cur = edges[e];
        loop.push_back({static_cast<double>(cur.x0), static_cast<double>(cur.y0)});
        const int ex = cur.x0 + cur.dx;
        const int ey = cur.y0 + cur.dy;
        const auto& cands = outgoing[vertex_key(ex, ey)];
        // At a diagonal pinch prefer the outward turn so 8-neighbours stay joined.
        const int prefs[3][2] = {{cur.dy, -cur.dx}, {cur.dx, cur.dy}, {-cur.dy, cur.dx}};
        std::size_t next = e;
        for (const auto& pref : prefs) {
            for (std::size_t cand : cands) {
                if (!used[cand] && edges[cand].dx == pref[0] && edges[cand].dy == pref[1]) {
                    next = cand;
                    break;
                }
            }
            if (next != e) break;
        }
        if (next == e) break;
        e = next;
    }

    // Drop collinear vertices.
    std::vector<Point> corners;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& prev = loop[(i + n - 1) % n];
        const Point& cur = loop[i];
        const Point& next = loop[(i + 1) % n];
        const double cross = (cur.x - prev.x) * (next.y - cur.y) - (cur.y - prev.y) * (next.x - cur.x);
        if (cross != 0.0) corners.push_back(cur);
    }
    return Contour(std::move(corners));
}

// -----------------------------------------------------------------------------
// IoU
// -----------------------------------------------------------------------------

double pixel_iou(const BitMask& a, const BitMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorKind::DimensionMismatch, "masks differ in size");
    }
    const auto ba = a.bits();
    const auto bb = b.bits();
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < ba.size(); ++i) {
        inter += ba[i] & bb[i];
        uni += ba[i] | bb[i];
    }
    if (uni == 0) throw Error(ErrorKind::BothEmpty, "IoU of two empty masks");
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double box_iou(const Box& a, const Box& b) {
    const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) {
        if (a == b) throw Error(ErrorKind::BothEmpty, "IoU of two identical zero-area boxes");
        return 0.0;
    }
    return inter / uni;
}

}  // namespace polarmask
