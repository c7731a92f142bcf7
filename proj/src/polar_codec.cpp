#include "polarmask/polar_codec.hpp"

#include "polarmask/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polarmask {

namespace {

constexpr double kParamTolerance = 1e-12;

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

// Contour sample relative to the center.
struct PolarSample {
    Point offset;
    double distance;
};

}  // namespace

AngleGrid::AngleGrid(int n) : n_(n) {
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "angle grid needs n >= 3, got " + std::to_string(n));
}

std::vector<double> AngleGrid::angles() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i)] = angle(i);
    return out;
}

double CodecConfig::tolerance_for(const AngleGrid& grid) const {
    return angle_match_tolerance.value_or(0.5 * grid.delta());
}

void CodecConfig::validate(const AngleGrid& grid) const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
    }
    const double tol = tolerance_for(grid);
    if (!(tol > 0.0) || tol > 0.5 * grid.delta() * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InvalidArgument, "angle_match_tolerance must lie in (0, delta/2]");
    }
    if (!(max_point_spacing > 0.0) || !(hit_window > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "sampling parameters must be positive");
    }
}

PolarInstance::PolarInstance(Point center, AngleGrid grid, std::vector<double> rays, double epsilon)
    : center_(center), grid_(grid), rays_(std::move(rays)) {
    if (!std::isfinite(center_.x) || !std::isfinite(center_.y)) {
        throw Error(ErrorKind::InvalidRays, "non-finite center");
    }
    if (rays_.size() != static_cast<std::size_t>(grid_.size())) {
        throw Error(ErrorKind::InvalidRays, "expected " + std::to_string(grid_.size()) +
                                                " rays, got " + std::to_string(rays_.size()));
    }
    for (double d : rays_) {
        if (!std::isfinite(d) || d < epsilon) {
            throw Error(ErrorKind::InvalidRays, "ray length below epsilon or non-finite");
        }
    }
}

Point instance_center(const Contour& c, const CodecConfig& cfg) {
    switch (cfg.center_mode) {
        case CenterMode::Mass: return mass_center(c);
        case CenterMode::Box: return box_center(c);
        case CenterMode::Explicit: return cfg.explicit_center;
    }
    return mass_center(c);
}

std::vector<double> ray_intersections(const Contour& c, Point origin, double angle) {
    const Point dir{std::cos(angle), std::sin(angle)};
    const auto pts = c.points();
    const std::size_t n = pts.size();
    std::vector<double> hits;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = pts[i];
        const Point b = pts[(i + 1) % n];
        const Point e = b - a;
        const Point w = a - origin;
        const double len = std::hypot(e.x, e.y);
        if (len == 0.0) continue;
        const double denom = cross(dir, e);
        if (std::abs(denom) <= kParamTolerance * len) {
            // Parallel. Only a collinear segment touches the ray; its start
            // vertex is the one that belongs to it.
            if (std::abs(cross(w, dir)) <= kParamTolerance * (std::hypot(w.x, w.y) + 1.0)) {
                const double t = dot(w, dir);
                if (t >= 0.0) hits.push_back(t);
            }
            continue;
        }
        const double t = cross(w, e) / denom;
        const double s = cross(w, dir) / denom;
        if (t < -kParamTolerance * (len + 1.0)) continue;
        if (s < -kParamTolerance || s >= 1.0 - kParamTolerance) continue;
        hits.push_back(std::max(t, 0.0));
    }
    std::sort(hits.begin(), hits.end());
    return hits;
}

PolarInstance encode_traversal(const Contour& c, Point center, const AngleGrid& grid,
                               const CodecConfig& cfg) {
    cfg.validate(grid);
    if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
        throw Error(ErrorKind::InvalidArgument, "non-finite center");
    }

    // Walk the contour at sub-pixel spacing and record each sample's polar
    // coordinates about the center.
    std::vector<PolarSample> samples;
    const auto pts = c.points();
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = pts[i];
        const Point e = pts[(i + 1) % n] - a;
        const double len = std::hypot(e.x, e.y);
        const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / cfg.max_point_spacing)));
        for (std::size_t k = 0; k < steps; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(steps);
            const Point p{a.x + t * e.x - center.x, a.y + t * e.y - center.y};
            const double dist = std::hypot(p.x, p.y);
            if (dist < cfg.epsilon) continue;  // angle undefined on the center itself
            samples.push_back({p, dist});
        }
    }

    const double tol = cfg.tolerance_for(grid);
    const double window = std::min(cfg.hit_window, tol);
    std::vector<double> rays(static_cast<std::size_t>(grid.size()), cfg.epsilon);
    for (int k = 0; k < grid.size(); ++k) {
        const Point dir{std::cos(grid.angle(k)), std::sin(grid.angle(k))};
        double hit = -1.0;
        double best_offset = 0.0;
        double fallback = -1.0;
        for (const auto& s : samples) {
            // Signed angle from the ray to the sample, in (-pi, pi].
            const double off = std::atan2(cross(dir, s.offset), dot(dir, s.offset));
            const double mag = std::abs(off);
            if (mag <= window) {
                hit = std::max(hit, s.distance);
            } else if (hit < 0.0 && mag <= tol) {
                // Nearest populated angle; on equal distance the counter-clockwise
                // (positive offset) side wins, then the farther sample.
                const double best_mag = std::abs(best_offset);
                if (fallback < 0.0 || mag < best_mag ||
                    (mag == best_mag && off > best_offset) ||
                    (off == best_offset && s.distance > fallback)) {
                    best_offset = off;
                    fallback = s.distance;
                }
            }
        }
        const double d = hit >= 0.0 ? hit : fallback;
        if (d >= 0.0) rays[static_cast<std::size_t>(k)] = std::max(d, cfg.epsilon);
    }
    return PolarInstance(center, grid, std::move(rays), cfg.epsilon);
}

PolarInstance encode_raycast(const Contour& c, Point center, const AngleGrid& grid,
                             const CodecConfig& cfg) {
    cfg.validate(grid);
    if (!std::isfinite(center.x) || !std::isfinite(center.y)) {
        throw Error(ErrorKind::InvalidArgument, "non-finite center");
    }
    std::vector<double> rays(static_cast<std::size_t>(grid.size()), cfg.epsilon);
    for (int k = 0; k < grid.size(); ++k) {
        const auto hits = ray_intersections(c, center, grid.angle(k));
        if (!hits.empty()) rays[static_cast<std::size_t>(k)] = std::max(hits.back(), cfg.epsilon);
    }
    return PolarInstance(center, grid, std::move(rays), cfg.epsilon);
}

std::vector<Point> decode_points(const PolarInstance& p) {
    const auto rays = p.rays();
    std::vector<Point> pts;
    pts.reserve(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i) {
        const double theta = p.grid().angle(static_cast<int>(i));
        pts.push_back({std::cos(theta) * rays[i] + p.center().x, std::sin(theta) * rays[i] + p.center().y});
    }
    return pts;
}

Contour decode(const PolarInstance& p) { return Contour(decode_points(p)); }

double reconstruction_iou(const Contour& c, const AngleGrid& grid, const CodecConfig& cfg,
                          RasterSize raster) {
    const BitMask truth = rasterize_instance(c, raster.width, raster.height);
    const PolarInstance encoded = encode_raycast(c, instance_center(c, cfg), grid, cfg);
    const auto pts = decode_points(encoded);
    if (std::abs(signed_area(pts)) < Contour::kMinArea) {
        // Every ray collapsed to epsilon: nothing is reconstructed.
        return 0.0;
    }
    return pixel_iou(truth, rasterize(Contour(pts), raster.width, raster.height));
}

}  // namespace polarmask
