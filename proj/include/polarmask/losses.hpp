#pragma once

#include "polarmask/geometry.hpp"

#include <span>
#include <vector>

namespace polarmask {

/// Ground-truth and predicted ray lengths on the same angle grid.
class RayPair {
public:
    RayPair(std::vector<double> target, std::vector<double> predicted, double epsilon = 1e-6);

    std::span<const double> target() const { return target_; }
    std::span<const double> predicted() const { return predicted_; }
    std::size_t size() const { return target_.size(); }

private:
    std::vector<double> target_;
    std::vector<double> predicted_;
};

struct SmoothL1Config {
    double alpha = 1.0;
    double beta = 1.0;
};

struct SamplingConfig {
    int stride = 8;
    double radius_factor = 1.5;
};

/// sqrt(min ray / max ray).
double polar_centerness(std::span<const double> rays, double epsilon = 1e-6);

/// sum(min(d, d*)) / sum(max(d, d*)).
double polar_iou_simplified(const RayPair& p);

/// sum(min(d, d*)^2) / sum(max(d, d*)^2): the sector-area form, which tends to
/// the mask IoU of two star-shaped regions about a shared center.
double polar_iou_power(const RayPair& p);

/// log(sum max / sum min) == -log(polar_iou_simplified).
double polar_iou_loss(const RayPair& p);

/// dL/dd*_i. Where d*_i == d_i the two one-sided derivatives are averaged.
std::vector<double> polar_iou_loss_grad(const RayPair& p);

/// alpha * mean_i h(d*_i - d_i), h the Huber-style smooth-l1 with switch point beta.
double smooth_l1_loss(const RayPair& p, const SmoothL1Config& cfg = {});
std::vector<double> smooth_l1_loss_grad(const RayPair& p, const SmoothL1Config& cfg = {});

/// Feature-grid cell centers (x = (j + 0.5) * stride, likewise y) whose x and y
/// each lie within radius_factor * stride of the mass center, clipped to the
/// feature extent.
std::vector<Point> center_samples(Point mass_center, const SamplingConfig& cfg, const Box& feature_extent);

/// Classification score times centerness.
double fused_score(double class_score, double centerness);

}  // namespace polarmask
