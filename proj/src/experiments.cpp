#include "polarmask/experiments.hpp"

#include "polarmask/error.hpp"
#include "polarmask/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace polarmask {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinShapeArea = 100.0;

// mt19937_64 is fully specified by the standard; the standard distributions
// are not, so uniforms are derived from the raw 64-bit output directly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (pts.size() < 3) return pts;
    auto turn = [](Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
        const Point& p = pts[i - 1];
        while (k >= t && turn(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

bool star_convex_about(std::span<const Point> pts, Point c) {
    const std::size_t n = pts.size();
    double swept = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = pts[i] - c;
        const Point b = pts[(i + 1) % n] - c;
        const double cr = a.x * b.y - a.y * b.x;
        if (cr <= 0.0) return false;
        swept += std::atan2(cr, a.x * b.x + a.y * b.y);
    }
    return std::abs(swept - kTwoPi) < 1e-6;
}

// Shape centered near the origin, before placement in the image.
std::vector<Point> draw_shape(Rng& rng, ShapeKind kind, double radius) {
    std::vector<Point> pts;
    switch (kind) {
        case ShapeKind::Ellipse: {
            const double a = radius;
            const double b = radius * rng.uniform(0.4, 1.0);
            const double rot = rng.uniform(0.0, std::numbers::pi);
            constexpr int kVertices = 128;
            for (int j = 0; j < kVertices; ++j) {
                const double t = kTwoPi * j / kVertices;
                const double x = a * std::cos(t);
                const double y = b * std::sin(t);
                pts.push_back({x * std::cos(rot) - y * std::sin(rot), x * std::sin(rot) + y * std::cos(rot)});
            }
            break;
        }
        case ShapeKind::ConvexPoly: {
            const int k = rng.uniform_int(5, 12);
            std::vector<Point> cloud;
            for (int j = 0; j < k; ++j) {
                const double r = radius * std::sqrt(rng.uniform());
                const double t = rng.uniform(0.0, kTwoPi);
                cloud.push_back({r * std::cos(t), r * std::sin(t)});
            }
            pts = convex_hull(std::move(cloud));
            break;
        }
        case ShapeKind::Star: {
            constexpr int kHarmonics = 4;
            constexpr int kVertices = 256;
            double amp[kHarmonics];
            double phase[kHarmonics];
            for (int h = 0; h < kHarmonics; ++h) {
                amp[h] = rng.uniform(0.0, 0.25) / std::sqrt(h + 1.0);
                phase[h] = rng.uniform(0.0, kTwoPi);
            }
            for (int j = 0; j < kVertices; ++j) {
                const double t = kTwoPi * j / kVertices;
                double r = 1.0;
                for (int h = 0; h < kHarmonics; ++h) r += amp[h] * std::cos((h + 1) * t + phase[h]);
                r *= radius;
                pts.push_back({r * std::cos(t), r * std::sin(t)});
            }
            break;
        }
    }
    return pts;
}

}  // namespace

ShapeKind parse_shape_kind(const std::string& name) {
    if (name == "ellipse") return ShapeKind::Ellipse;
    if (name == "convex_poly" || name == "convex") return ShapeKind::ConvexPoly;
    if (name == "star") return ShapeKind::Star;
    throw Error(ErrorKind::InvalidArgument, "unknown shape kind '" + name + "'");
}

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Ellipse: return "ellipse";
        case ShapeKind::ConvexPoly: return "convex_poly";
        case ShapeKind::Star: return "star";
    }
    return "unknown";
}

std::string to_string(CenterMode mode) {
    switch (mode) {
        case CenterMode::Mass: return "mass";
        case CenterMode::Box: return "box";
        case CenterMode::Explicit: return "explicit";
    }
    return "unknown";
}

CenterMode parse_center_mode(const std::string& name) {
    if (name == "mass") return CenterMode::Mass;
    if (name == "box") return CenterMode::Box;
    throw Error(ErrorKind::InvalidArgument, "unknown center mode '" + name + "'");
}

std::string to_string(LossKind kind) { return kind == LossKind::PolarIou ? "polar-iou" : "smooth-l1"; }

LossKind parse_loss_kind(const std::string& name) {
    if (name == "polar-iou" || name == "polar_iou") return LossKind::PolarIou;
    if (name == "smooth-l1" || name == "smooth_l1") return LossKind::SmoothL1;
    throw Error(ErrorKind::InvalidArgument, "unknown loss '" + name + "'");
}

Corpus synth_corpus(std::uint64_t seed, int count, ShapeKind kind, const SynthOptions& opts) {
    if (count < 1) throw Error(ErrorKind::InvalidArgument, "corpus count must be >= 1");
    if (!(opts.min_radius > 0.0) || opts.max_radius < opts.min_radius) {
        throw Error(ErrorKind::InvalidArgument, "invalid radius range");
    }
    Rng rng(seed);
    Corpus corpus;
    corpus.source = CorpusSource::Synthetic;
    const double w = opts.image_size.width;
    const double h = opts.image_size.height;
    while (static_cast<int>(corpus.instances.size()) < count) {
        const double radius = std::exp(rng.uniform(std::log(opts.min_radius), std::log(opts.max_radius)));
        std::vector<Point> pts = draw_shape(rng, kind, radius);
        if (pts.size() < 3 || std::abs(signed_area(pts)) < kMinShapeArea) continue;
        const Box b = bounding_box(pts);
        if (b.width() > w - 2.0 || b.height() > h - 2.0) continue;
        const Point offset{rng.uniform(1.0 - b.x_min, w - 1.0 - b.x_max),
                           rng.uniform(1.0 - b.y_min, h - 1.0 - b.y_max)};
        for (auto& p : pts) p = p + offset;
        Contour contour(std::move(pts));
        if (kind == ShapeKind::Star && !star_convex_about(contour.points(), mass_center(contour))) continue;
        corpus.instances.push_back(CorpusItem{
            fmt::format("{}-{:04d}", to_string(kind), corpus.instances.size()), std::move(contour),
            opts.image_size, 0});
    }
    return corpus;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<ExperimentRecord> upper_bound_sweep(const Corpus& corpus, const std::vector<int>& ray_counts,
                                                const std::vector<CenterMode>& center_modes,
                                                std::optional<RasterSize> raster) {
    if (ray_counts.empty()) throw Error(ErrorKind::InvalidArgument, "no ray counts given");
    if (center_modes.empty()) throw Error(ErrorKind::InvalidArgument, "no center modes given");
    if (corpus.instances.empty()) throw Error(ErrorKind::InvalidArgument, "empty corpus");

    // Aggregate in id order so results do not depend on corpus order.
    std::vector<const CorpusItem*> items;
    for (const auto& it : corpus.instances) items.push_back(&it);
    std::sort(items.begin(), items.end(), [](auto* a, auto* b) { return a->id < b->id; });

    std::vector<ExperimentRecord> records;
    for (CenterMode mode : center_modes) {
        CodecConfig cfg;
        cfg.center_mode = mode;
        for (int n : ray_counts) {
            const AngleGrid grid(n);
            const auto start = std::chrono::steady_clock::now();
            std::vector<double> ious;
            ious.reserve(items.size());
            for (const auto* it : items) {
                ious.push_back(reconstruction_iou(it->contour, grid, cfg, raster.value_or(it->image_size)));
            }
            const auto stop = std::chrono::steady_clock::now();
            records.push_back({n, mode, mean(ious), median(ious), static_cast<int>(ious.size()),
                               std::chrono::duration<double, std::milli>(stop - start).count()});
        }
    }
    return records;
}

void FitConfig::validate() const {
    if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
    if (!(step_size > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
    if (!(init_noise >= 0.0)) throw Error(ErrorKind::InvalidArgument, "init noise must be >= 0");
}

FitResult fit_rays(const Contour& target, const AngleGrid& grid, const FitConfig& cfg) {
    cfg.validate();
    CodecConfig codec;
    codec.epsilon = cfg.epsilon;
    const PolarInstance truth = encode_raycast(target, mass_center(target), grid, codec);
    const std::vector<double> gt(truth.rays().begin(), truth.rays().end());
    const std::size_t n = gt.size();

    std::vector<double> u(n);
    if (cfg.init == FitConfig::Init::Target) {
        for (std::size_t i = 0; i < n; ++i) u[i] = std::log(gt[i]);
    } else {
        Rng rng(cfg.seed);
        const double base = std::log(mean(gt));
        for (auto& v : u) v = base + rng.uniform(-cfg.init_noise, cfg.init_noise);
    }

    auto ray_of = [&](double v) { return std::max(std::exp(v), cfg.epsilon); };
    // The iterate starts from the exact target when asked to, since exp(log(d))
    // need not round-trip.
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = cfg.init == FitConfig::Init::Target ? gt[i] : ray_of(u[i]);
    auto check = [&] {
        for (double v : d) {
            if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteLoss, "ray diverged; step size too large");
        }
    };

    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(cfg.steps));
    for (int step = 0; step < cfg.steps; ++step) {
        check();
        const RayPair pair(gt, d, cfg.epsilon);
        double loss = 0.0;
        std::vector<double> grad;
        if (cfg.loss_kind == LossKind::PolarIou) {
            loss = polar_iou_loss(pair);
            grad = polar_iou_loss_grad(pair);
        } else {
            loss = smooth_l1_loss(pair, cfg.smooth_l1);
            grad = smooth_l1_loss_grad(pair, cfg.smooth_l1);
        }
        if (!std::isfinite(loss)) throw Error(ErrorKind::NonFiniteLoss, fmt::format("loss is {} at step {}", loss, step));
        trace.push_back(loss);
        // d* = exp(u), so dL/du = dL/dd* * d*.
        for (std::size_t i = 0; i < n; ++i) {
            if (grad[i] == 0.0) continue;
            u[i] -= cfg.step_size * grad[i] * d[i];
            d[i] = ray_of(u[i]);
        }
    }
    check();
    auto final_rays = std::move(d);
    return {PolarInstance(truth.center(), grid, std::move(final_rays), cfg.epsilon), truth, std::move(trace)};
}

double fit_pixel_iou(const Contour& target, const PolarInstance& fitted, RasterSize raster) {
    const BitMask truth = rasterize_instance(target, raster.width, raster.height);
    const auto pts = decode_points(fitted);
    if (std::abs(signed_area(pts)) < Contour::kMinArea) return 0.0;
    return pixel_iou(truth, rasterize(Contour(pts), raster.width, raster.height));
}

double PairedFit::best_smooth_l1_pixel() const {
    return smooth_l1_pixel.empty() ? 0.0 : *std::max_element(smooth_l1_pixel.begin(), smooth_l1_pixel.end());
}

double LossComparison::polar_win_rate() const {
    if (shapes.empty()) return 0.0;
    const auto wins = std::count_if(shapes.begin(), shapes.end(),
                                    [](const PairedFit& s) { return s.polar_iou_pixel >= s.best_smooth_l1_pixel(); });
    return static_cast<double>(wins) / static_cast<double>(shapes.size());
}

double LossComparison::polar_win_rate_vs_best_alpha() const {
    if (shapes.empty() || alphas.empty()) return 0.0;
    std::size_t best = 0;
    double best_mean = -1.0;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        std::vector<double> v;
        for (const auto& s : shapes) v.push_back(s.smooth_l1_pixel[a]);
        if (mean(v) > best_mean) {
            best_mean = mean(v);
            best = a;
        }
    }
    const auto wins = std::count_if(shapes.begin(), shapes.end(), [&](const PairedFit& s) {
        return s.polar_iou_pixel >= s.smooth_l1_pixel[best];
    });
    return static_cast<double>(wins) / static_cast<double>(shapes.size());
}

LossComparison compare_losses(const Corpus& corpus, const AngleGrid& grid, const FitConfig& base,
                              const std::vector<double>& alphas) {
    LossComparison out;
    out.alphas = alphas;
    for (std::size_t i = 0; i < corpus.instances.size(); ++i) {
        const auto& item = corpus.instances[i];
        FitConfig cfg = base;
        cfg.seed = base.seed + i;
        PairedFit row;
        row.id = item.id;
        cfg.loss_kind = LossKind::PolarIou;
        row.polar_iou_pixel = fit_pixel_iou(item.contour, fit_rays(item.contour, grid, cfg).fitted, item.image_size);
        cfg.loss_kind = LossKind::SmoothL1;
        for (double alpha : alphas) {
            cfg.smooth_l1.alpha = alpha;
            row.smooth_l1_pixel.push_back(
                fit_pixel_iou(item.contour, fit_rays(item.contour, grid, cfg).fitted, item.image_size));
        }
        out.shapes.push_back(std::move(row));
    }
    return out;
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
    std::string out = "ray_count,center_mode,mean_iou,median_iou,instance_count,wall_time_ms\n";
    for (const auto& r : records) {
        out += fmt::format("{},{},{:.9f},{:.9f},{},{:.3f}\n", r.ray_count, to_string(r.center_mode), r.mean_iou,
                           r.median_iou, r.instance_count, r.wall_time_ms);
    }
    return out;
}

void report(const std::vector<ExperimentRecord>& records, const std::filesystem::path& path) {
    if (records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to report");
    write_file_atomic(path, records_csv(records));
}

}  // namespace polarmask
