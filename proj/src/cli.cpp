#include "polarmask/cli.hpp"

#include "polarmask/error.hpp"
#include "polarmask/experiments.hpp"
#include "polarmask/io.hpp"
#include "polarmask/losses.hpp"
#include "polarmask/postprocess.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <sstream>

namespace polarmask {

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

RasterSize parse_raster(const std::string& s) {
    const auto x = s.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument(s);
        std::size_t used = 0;
        const int h = std::stoi(s.substr(0, x), &used);
        if (used != x) throw std::invalid_argument(s);
        const std::string rest = s.substr(x + 1);
        const int w = std::stoi(rest, &used);
        if (used != rest.size() || h < 1 || w < 1) throw std::invalid_argument(s);
        return {h, w};
    } catch (const std::exception&) {
        throw UsageError("raster must look like HxW, got '" + s + "'");
    }
}

std::optional<RasterSize> optional_raster(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_raster(s);
}

struct SyntheticSpec {
    ShapeKind kind;
    int count;
    std::uint64_t seed;
};

SyntheticSpec parse_synthetic(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) throw UsageError("--synthetic expects kind,count,seed");
    try {
        return {parse_shape_kind(parts[0]), std::stoi(parts[1]), std::stoull(parts[2])};
    } catch (const Error& e) {
        throw UsageError(e.what());
    } catch (const std::exception&) {
        throw UsageError("--synthetic expects kind,count,seed, got '" + s + "'");
    }
}

Corpus corpus_from(const std::string& input, const std::string& synthetic) {
    if (!input.empty() && !synthetic.empty()) throw UsageError("give either --input or --synthetic, not both");
    if (input.empty() && synthetic.empty()) throw UsageError("one of --input or --synthetic is required");
    if (!synthetic.empty()) {
        const auto synth = parse_synthetic(synthetic);
        if (synth.count < 1) throw UsageError("synthetic count must be >= 1");
        return synth_corpus(synth.seed, synth.count, synth.kind);
    }
    return load_instances(input);
}

CenterMode center_option(const std::string& s) {
    try {
        return parse_center_mode(s);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

// --------------------------------------------------------------------------

struct EncodeArgs {
    std::string input, out, center = "mass";
    int rays = 36;
    double eps = CodecConfig::kDefaultEpsilon;
    bool exact = false;
};

void run_encode(const EncodeArgs& a) {
    if (a.rays < 3) throw UsageError("--rays must be >= 3");
    if (!(a.eps > 0.0)) throw UsageError("--eps must be positive");
    CodecConfig cfg;
    cfg.epsilon = a.eps;
    cfg.center_mode = center_option(a.center);
    const AngleGrid grid(a.rays);
    const Corpus corpus = load_instances(a.input);
    std::vector<EncodedInstance> encoded;
    for (const auto& it : corpus.instances) {
        try {
            const Point c = instance_center(it.contour, cfg);
            encoded.push_back({it.id, it.image_size, it.category,
                               a.exact ? encode_raycast(it.contour, c, grid, cfg)
                                       : encode_traversal(it.contour, c, grid, cfg)});
        } catch (const Error& e) {
            throw Error(e.kind(), "instance '" + it.id + "': " + e.what());
        }
    }
    write_file_atomic(a.out, dump_polar(encoded));
}

struct DecodeArgs {
    std::string input, out, raster, bitmap_dir;
};

void run_decode(const DecodeArgs& a) {
    const std::optional<RasterSize> raster = optional_raster(a.raster);
    const auto items = load_polar(a.input);
    Corpus corpus;
    for (const auto& it : items) {
        try {
            Contour contour = decode(it.polar);
            if (!a.bitmap_dir.empty()) {
                const RasterSize size = raster.value_or(it.image_size);
                std::filesystem::create_directories(a.bitmap_dir);
                write_file_atomic(std::filesystem::path(a.bitmap_dir) / (it.id + ".pbm"),
                                  to_pbm(rasterize(contour, size.width, size.height)));
            }
            corpus.instances.push_back(CorpusItem{it.id, std::move(contour), raster.value_or(it.image_size), it.category});
        } catch (const Error& e) {
            throw Error(e.kind(), "instance '" + it.id + "': " + e.what());
        }
    }
    write_file_atomic(a.out, dump_instances(corpus));
}

struct UpperBoundArgs {
    std::string input, synthetic, rays = "18,24,36,72,90,120", center = "both", raster, out;
};

void run_upperbound(const UpperBoundArgs& a) {
    std::vector<int> counts;
    for (const auto& s : split(a.rays, ',')) {
        try {
            counts.push_back(std::stoi(s));
        } catch (const std::exception&) {
            throw UsageError("--rays expects a comma-separated list of integers");
        }
        if (counts.back() < 3) throw UsageError("every ray count must be >= 3");
    }
    if (counts.empty()) throw UsageError("--rays is empty");
    std::vector<CenterMode> modes;
    if (a.center == "both") {
        modes = {CenterMode::Mass, CenterMode::Box};
    } else {
        modes = {center_option(a.center)};
    }
    const Corpus corpus = corpus_from(a.input, a.synthetic);
    const std::optional<RasterSize> raster = optional_raster(a.raster);
    report(upper_bound_sweep(corpus, counts, modes, raster), a.out);
}

struct FitArgs {
    std::string input, synthetic, loss = "polar-iou", out, trace;
    double alpha = 1.0, lr = 0.05;
    int steps = 500, rays = 36;
    std::uint64_t seed = 0;
};

void run_fit(const FitArgs& a) {
    FitConfig cfg;
    try {
        cfg.loss_kind = parse_loss_kind(a.loss);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    if (!(a.alpha > 0.0)) throw UsageError("--alpha must be positive");
    if (a.steps < 1) throw UsageError("--steps must be >= 1");
    if (!(a.lr > 0.0)) throw UsageError("--lr must be positive");
    if (a.rays < 3) throw UsageError("--rays must be >= 3");
    cfg.smooth_l1.alpha = a.alpha;
    cfg.steps = a.steps;
    cfg.step_size = a.lr;
    const AngleGrid grid(a.rays);
    const Corpus corpus = corpus_from(a.input, a.synthetic);

    std::string csv = "id,loss,alpha,steps,final_loss,polar_iou,pixel_iou\n";
    std::string trace = "id,step,loss\n";
    for (std::size_t i = 0; i < corpus.instances.size(); ++i) {
        const auto& it = corpus.instances[i];
        cfg.seed = a.seed + i;
        try {
            const FitResult fit = fit_rays(it.contour, grid, cfg);
            const std::vector<double> gt(fit.ground_truth.rays().begin(), fit.ground_truth.rays().end());
            const std::vector<double> got(fit.fitted.rays().begin(), fit.fitted.rays().end());
            const double piou = polar_iou_simplified(RayPair(gt, got));
            csv += fmt::format("{},{},{},{},{:.9g},{:.9f},{:.9f}\n", it.id, to_string(cfg.loss_kind),
                               cfg.loss_kind == LossKind::SmoothL1 ? cfg.smooth_l1.alpha : 0.0, cfg.steps,
                               fit.trace.back(), piou, fit_pixel_iou(it.contour, fit.fitted, it.image_size));
            for (std::size_t s = 0; s < fit.trace.size(); ++s) {
                trace += fmt::format("{},{},{:.12g}\n", it.id, s, fit.trace[s]);
            }
        } catch (const Error& e) {
            throw Error(e.kind(), "instance '" + it.id + "': " + e.what());
        }
    }
    write_file_atomic(a.out, csv);
    if (!a.trace.empty()) write_file_atomic(a.trace, trace);
}

struct NmsArgs {
    std::string candidates, raster, out;
    double score_thr = 0.05, iou_thr = 0.5;
    int topk = 1000;
};

void run_nms(const NmsArgs& a) {
    NmsConfig cfg{a.score_thr, a.topk, a.iou_thr};
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const RasterSize raster = parse_raster(a.raster);
    const auto cands = load_candidates(a.candidates);
    write_file_atomic(a.out, dump_assembled(assemble(cands, cfg, raster)));
}

struct IouArgs {
    std::string a, b, mode = "polar-simplified", raster;
};

// Entry of either file kind reduced to what the iou modes need.
struct IouEntry {
    std::string id;
    std::optional<PolarInstance> polar;
    std::optional<Contour> contour;
    std::optional<RasterSize> size;
};

std::vector<IouEntry> load_iou_entries(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<IouEntry> out;
    if (text.find("\"polygon\"") != std::string::npos) {
        for (auto& it : parse_instances(text).instances) out.push_back({it.id, std::nullopt, it.contour, it.image_size});
        return out;
    }
    if (text.find("\"image_size\"") != std::string::npos) {
        for (auto& it : parse_polar(text)) out.push_back({it.id, it.polar, std::nullopt, it.image_size});
        return out;
    }
    const auto cands = parse_candidates(text);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        out.push_back({"#" + std::to_string(i), cands[i].instance, std::nullopt, std::nullopt});
    }
    return out;
}

void run_iou(const IouArgs& a, std::ostream& out) {
    if (a.mode != "polar-simplified" && a.mode != "polar-power" && a.mode != "pixel") {
        throw UsageError("--mode must be polar-simplified, polar-power or pixel");
    }
    const std::optional<RasterSize> raster = optional_raster(a.raster);
    const auto lhs = load_iou_entries(a.a);
    const auto rhs = load_iou_entries(a.b);
    if (lhs.size() != rhs.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("files hold {} and {} entries", lhs.size(), rhs.size()));
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const auto& x = lhs[i];
        const auto& y = rhs[i];
        double v = 0.0;
        try {
            if (a.mode == "pixel") {
                const auto size = raster ? raster : (x.size ? x.size : y.size);
                if (!size) throw UsageError("pixel mode needs --raster for files without image_size");
                auto mask = [&](const IouEntry& e) {
                    if (e.contour) return rasterize(*e.contour, size->width, size->height);
                    const auto pts = decode_points(*e.polar);
                    if (std::abs(signed_area(pts)) < Contour::kMinArea) return BitMask(size->width, size->height);
                    return rasterize(Contour(pts), size->width, size->height);
                };
                v = pixel_iou(mask(x), mask(y));
            } else {
                if (!x.polar || !y.polar) throw Error(ErrorKind::InvalidArgument, "polar modes need polar files");
                const RayPair pair({x.polar->rays().begin(), x.polar->rays().end()},
                                   {y.polar->rays().begin(), y.polar->rays().end()});
                v = a.mode == "polar-power" ? polar_iou_power(pair) : polar_iou_simplified(pair);
            }
        } catch (const Error& e) {
            throw Error(e.kind(), "entry '" + x.id + "': " + e.what());
        }
        values.push_back(v);
        out << fmt::format("{} {:.9f}\n", x.id, v);
    }
    out << fmt::format("mean {:.9f}\n", mean(values));
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Polar instance-mask encoding, losses and post-processing", "polarmask"};
    app.require_subcommand(1);

    EncodeArgs enc;
    auto* encode = app.add_subcommand("encode", "Encode polygon instances as center + rays");
    encode->add_option("--input", enc.input, "Instance file (JSON)")->required();
    encode->add_option("--rays", enc.rays, "Number of rays")->capture_default_str();
    encode->add_option("--center", enc.center, "mass | box")->capture_default_str();
    encode->add_option("--eps", enc.eps, "Minimum ray length")->capture_default_str();
    encode->add_flag("--exact", enc.exact, "Use the exact ray-casting encoder");
    encode->add_option("--out", enc.out, "Output polar file")->required();

    DecodeArgs dec;
    auto* decode_cmd = app.add_subcommand("decode", "Decode polar instances back to polygons");
    decode_cmd->add_option("--input", dec.input, "Polar file (JSON)")->required();
    decode_cmd->add_option("--raster", dec.raster, "HxW raster for bitmap dumps");
    decode_cmd->add_option("--bitmap-dir", dec.bitmap_dir, "Write one PBM mask per instance here");
    decode_cmd->add_option("--out", dec.out, "Output instance file")->required();

    UpperBoundArgs ub;
    auto* upper = app.add_subcommand("upperbound", "Reconstruction IoU sweep over ray counts");
    upper->add_option("--input", ub.input, "Instance file (JSON)");
    upper->add_option("--synthetic", ub.synthetic, "kind,count,seed (kind: ellipse|convex_poly|star)");
    upper->add_option("--rays", ub.rays, "Comma-separated ray counts")->capture_default_str();
    upper->add_option("--center", ub.center, "mass | box | both")->capture_default_str();
    upper->add_option("--raster", ub.raster, "HxW raster (default: per-instance image size)");
    upper->add_option("--out", ub.out, "Output CSV")->required();

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit rays to targets by gradient descent");
    fit_cmd->add_option("--input", fit.input, "Instance file (JSON)");
    fit_cmd->add_option("--synthetic", fit.synthetic, "kind,count,seed");
    fit_cmd->add_option("--loss", fit.loss, "polar-iou | smooth-l1")->capture_default_str();
    fit_cmd->add_option("--alpha", fit.alpha, "Smooth-l1 balance factor")->capture_default_str();
    fit_cmd->add_option("--steps", fit.steps, "Gradient steps")->capture_default_str();
    fit_cmd->add_option("--lr", fit.lr, "Step size on log ray lengths")->capture_default_str();
    fit_cmd->add_option("--seed", fit.seed, "Initialization seed")->capture_default_str();
    fit_cmd->add_option("--rays", fit.rays, "Number of rays")->capture_default_str();
    fit_cmd->add_option("--trace", fit.trace, "Optional per-step loss CSV");
    fit_cmd->add_option("--out", fit.out, "Output CSV")->required();

    NmsArgs nm;
    auto* nms_cmd = app.add_subcommand("nms", "Score threshold, top-k, NMS and mask assembly");
    nms_cmd->add_option("--candidates", nm.candidates, "Candidate file (JSON)")->required();
    nms_cmd->add_option("--score-thr", nm.score_thr, "Fused score threshold")->capture_default_str();
    nms_cmd->add_option("--topk", nm.topk, "Candidates kept per level")->capture_default_str();
    nms_cmd->add_option("--iou-thr", nm.iou_thr, "Box IoU suppression threshold")->capture_default_str();
    nms_cmd->add_option("--raster", nm.raster, "HxW raster for mask assembly")->required();
    nms_cmd->add_option("--out", nm.out, "Output file")->required();

    IouArgs io;
    auto* iou_cmd = app.add_subcommand("iou", "IoU between paired entries of two files");
    iou_cmd->add_option("--a", io.a, "First file")->required();
    iou_cmd->add_option("--b", io.b, "Second file")->required();
    iou_cmd->add_option("--mode", io.mode, "polar-simplified | polar-power | pixel")->capture_default_str();
    iou_cmd->add_option("--raster", io.raster, "HxW raster for pixel mode");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "polarmask: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        if (sub == encode) run_encode(enc);
        else if (sub == decode_cmd) run_decode(dec);
        else if (sub == upper) run_upperbound(ub);
        else if (sub == fit_cmd) run_fit(fit);
        else if (sub == nms_cmd) run_nms(nm);
        else if (sub == iou_cmd) run_iou(io, out);
    } catch (const UsageError& e) {
        err << "polarmask " << name << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "polarmask " << name << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "polarmask " << name << ": " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace polarmask
