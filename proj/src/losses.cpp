#include "polarmask/losses.hpp"

#include "polarmask/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polarmask {

namespace {

void check_rays(std::span<const double> rays, double epsilon, const char* what) {
    if (rays.empty()) throw Error(ErrorKind::InvalidRays, std::string(what) + " is empty");
    for (double d : rays) {
        if (!std::isfinite(d) || d < epsilon) {
            throw Error(ErrorKind::InvalidRays, std::string(what) + " has a ray below epsilon or non-finite");
        }
    }
}

struct MinMaxSums {
    double min_sum = 0.0;
    double max_sum = 0.0;
    double min_sq = 0.0;
    double max_sq = 0.0;
};

MinMaxSums min_max_sums(const RayPair& p) {
    MinMaxSums s;
    const auto d = p.target();
    const auto q = p.predicted();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double lo = std::min(d[i], q[i]);
        const double hi = std::max(d[i], q[i]);
        s.min_sum += lo;
        s.max_sum += hi;
        s.min_sq += lo * lo;
        s.max_sq += hi * hi;
    }
    return s;
}

}  // namespace

RayPair::RayPair(std::vector<double> target, std::vector<double> predicted, double epsilon)
    : target_(std::move(target)), predicted_(std::move(predicted)) {
    if (target_.size() != predicted_.size()) {
        throw Error(ErrorKind::InvalidRays, "target has " + std::to_string(target_.size()) +
                                                " rays, prediction has " + std::to_string(predicted_.size()));
    }
    check_rays(target_, epsilon, "target");
    check_rays(predicted_, epsilon, "prediction");
}

double polar_centerness(std::span<const double> rays, double epsilon) {
    check_rays(rays, epsilon, "rays");
    const auto [lo, hi] = std::minmax_element(rays.begin(), rays.end());
    return std::sqrt(*lo / *hi);
}

double polar_iou_simplified(const RayPair& p) {
    const auto s = min_max_sums(p);
    return s.min_sum / s.max_sum;
}

double polar_iou_power(const RayPair& p) {
    const auto s = min_max_sums(p);
    return s.min_sq / s.max_sq;
}

double polar_iou_loss(const RayPair& p) {
    const auto s = min_max_sums(p);
    return std::log(s.max_sum) - std::log(s.min_sum);
}

std::vector<double> polar_iou_loss_grad(const RayPair& p) {
    const auto s = min_max_sums(p);
    const double over = 1.0 / s.max_sum;    // d*_i > d_i: d*_i sits in the max sum
    const double under = -1.0 / s.min_sum;  // d*_i < d_i: d*_i sits in the min sum
    const auto d = p.target();
    const auto q = p.predicted();
    std::vector<double> g(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (q[i] > d[i]) {
            g[i] = over;
        } else if (q[i] < d[i]) {
            g[i] = under;
        } else {
            g[i] = 0.5 * (over + under);
        }
    }
    return g;
}

double smooth_l1_loss(const RayPair& p, const SmoothL1Config& cfg) {
    if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "smooth-l1 alpha and beta must be positive");
    }
    const auto d = p.target();
    const auto q = p.predicted();
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = std::abs(q[i] - d[i]);
        total += x < cfg.beta ? x * x / (2.0 * cfg.beta) : x - 0.5 * cfg.beta;
    }
    return cfg.alpha * total / static_cast<double>(d.size());
}

std::vector<double> smooth_l1_loss_grad(const RayPair& p, const SmoothL1Config& cfg) {
    if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "smooth-l1 alpha and beta must be positive");
    }
    const auto d = p.target();
    const auto q = p.predicted();
    const double scale = cfg.alpha / static_cast<double>(d.size());
    std::vector<double> g(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = q[i] - d[i];
        const double h = std::abs(x) < cfg.beta ? x / cfg.beta : (x > 0.0 ? 1.0 : -1.0);
        g[i] = scale * h;
    }
    return g;
}

std::vector<Point> center_samples(Point mass_center, const SamplingConfig& cfg, const Box& feature_extent) {
    if (cfg.stride < 1 || !(cfg.radius_factor > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "stride must be >= 1 and radius_factor > 0");
    }
    const Box& e = feature_extent;
    if (!(mass_center.x >= e.x_min && mass_center.x <= e.x_max && mass_center.y >= e.y_min &&
          mass_center.y <= e.y_max)) {
        throw Error(ErrorKind::OutOfExtent, "mass center lies outside the feature extent");
    }
    const double s = cfg.stride;
    const double radius = cfg.radius_factor * s;

    // Indices j with |(j + 0.5) s - c| <= radius.
    auto axis = [&](double c, double lo, double hi) {
        std::vector<double> out;
        const auto first = static_cast<long>(std::ceil((c - radius) / s - 0.5));
        const auto last = static_cast<long>(std::floor((c + radius) / s - 0.5));
        for (long j = first; j <= last; ++j) {
            const double v = (static_cast<double>(j) + 0.5) * s;
            if (std::abs(v - c) <= radius && v >= lo && v <= hi) out.push_back(v);
        }
        return out;
    };
    const auto xs = axis(mass_center.x, e.x_min, e.x_max);
    const auto ys = axis(mass_center.y, e.y_min, e.y_max);
    std::vector<Point> out;
    out.reserve(xs.size() * ys.size());
    for (double y : ys) {
        for (double x : xs) out.push_back({x, y});
    }
    return out;
}

double fused_score(double class_score, double centerness) {
    if (!(class_score >= 0.0 && class_score <= 1.0)) {
        throw Error(ErrorKind::OutOfRange, "class score outside [0, 1]");
    }
    if (!(centerness > 0.0 && centerness <= 1.0)) {
        throw Error(ErrorKind::OutOfRange, "centerness outside (0, 1]");
    }
    return class_score * centerness;
}

}  // namespace polarmask
