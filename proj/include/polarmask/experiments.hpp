#pragma once

#include "polarmask/geometry.hpp"
#include "polarmask/losses.hpp"
#include "polarmask/polar_codec.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace polarmask {

enum class CorpusSource { Synthetic, File };
enum class ShapeKind { Ellipse, ConvexPoly, Star };

struct CorpusItem {
    std::string id;
    Contour contour;
    RasterSize image_size;
    int category = 0;
};

struct Corpus {
    std::vector<CorpusItem> instances;
    CorpusSource source = CorpusSource::Synthetic;
};

struct SynthOptions {
    RasterSize image_size{256, 256};
    // Equivalent-radius range; sizes are drawn log-uniformly so small and
    // large instances are equally represented.
    double min_radius = 8.0;
    double max_radius = 100.0;
};

ShapeKind parse_shape_kind(const std::string& name);
std::string to_string(ShapeKind kind);

/// Deterministic per seed. Star shapes are star-convex about their own mass
/// center; convex shapes are convex hulls of random points. Every shape has
/// area >= 100 px^2 and fits inside the image.
Corpus synth_corpus(std::uint64_t seed, int count, ShapeKind kind, const SynthOptions& opts = {});

struct ExperimentRecord {
    int ray_count = 0;
    CenterMode center_mode = CenterMode::Mass;
    double mean_iou = 0.0;
    double median_iou = 0.0;
    int instance_count = 0;
    double wall_time_ms = 0.0;
};

std::string to_string(CenterMode mode);
CenterMode parse_center_mode(const std::string& name);

/// One record per (center mode, ray count), center modes outermost. When
/// `raster` is empty each instance is rasterized at its own image size.
std::vector<ExperimentRecord> upper_bound_sweep(const Corpus& corpus, const std::vector<int>& ray_counts,
                                                const std::vector<CenterMode>& center_modes,
                                                std::optional<RasterSize> raster = std::nullopt);

inline const std::vector<int> kDefaultRayCounts{18, 24, 36, 72, 90, 120};

enum class LossKind { PolarIou, SmoothL1 };
std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

struct FitConfig {
    enum class Init { NoisyMean, Target };

    LossKind loss_kind = LossKind::PolarIou;
    int steps = 500;
    double step_size = 0.05;  // on log ray lengths
    std::uint64_t seed = 0;
    SmoothL1Config smooth_l1{};
    Init init = Init::NoisyMean;
    double init_noise = 0.5;
    double epsilon = CodecConfig::kDefaultEpsilon;

    void validate() const;
};

struct FitResult {
    PolarInstance fitted;
    PolarInstance ground_truth;
    std::vector<double> trace;  // loss at each iterate before its update
};

/// Fixed-step gradient descent on u = log d*, fitting the raycast rays of the
/// target taken about its mass center.
FitResult fit_rays(const Contour& target, const AngleGrid& grid, const FitConfig& cfg);

/// Pixel IoU of the decoded fit against the rasterized target.
double fit_pixel_iou(const Contour& target, const PolarInstance& fitted, RasterSize raster);

struct PairedFit {
    std::string id;
    double polar_iou_pixel = 0.0;
    std::vector<double> smooth_l1_pixel;  // one per alpha
    double best_smooth_l1_pixel() const;
};

struct LossComparison {
    std::vector<double> alphas;
    std::vector<PairedFit> shapes;

    /// Fraction of shapes where the Polar IoU fit is at least as good as the
    /// best smooth-l1 fit for that shape.
    double polar_win_rate() const;
    /// Same, against the single alpha with the best corpus-mean IoU.
    double polar_win_rate_vs_best_alpha() const;
};

inline const std::vector<double> kSmoothL1Alphas{0.05, 0.30, 1.00};

/// Fits every corpus shape with Polar IoU loss and with smooth-l1 at each
/// alpha, using the same seed per shape.
LossComparison compare_losses(const Corpus& corpus, const AngleGrid& grid, const FitConfig& base,
                              const std::vector<double>& alphas = kSmoothL1Alphas);

std::string records_csv(const std::vector<ExperimentRecord>& records);

/// Writes records_csv() atomically. Throws InvalidArgument on empty input
/// without touching the filesystem.
void report(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path);

double mean(const std::vector<double>& v);
double median(std::vector<double> v);

}  // namespace polarmask
