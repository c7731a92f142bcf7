#pragma once

#include "polarmask/experiments.hpp"
#include "polarmask/polar_codec.hpp"
#include "polarmask/postprocess.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace polarmask {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// Instance files: [{"id", "image_size": [h, w], "polygon": [x0, y0, ...], "category"?}]
Corpus parse_instances(const std::string& json_text);
Corpus load_instances(const std::filesystem::path& path);
std::string dump_instances(const Corpus& corpus);
void save_instances(const Corpus& corpus, const std::filesystem::path& path);

/// Output of the encoder: instance metadata plus its polar form.
struct EncodedInstance {
    std::string id;
    RasterSize image_size;
    int category = 0;
    PolarInstance polar;
};

// Polar files: [{"id", "image_size", "category", "center": [x, y], "rays": [...]}]
std::vector<EncodedInstance> parse_polar(const std::string& json_text, double epsilon = 1e-6);
std::vector<EncodedInstance> load_polar(const std::filesystem::path& path, double epsilon = 1e-6);
std::string dump_polar(const std::vector<EncodedInstance>& items);

// Candidate files: [{"center", "rays", "class_score", "centerness", "level", "category"}]
std::vector<Candidate> parse_candidates(const std::string& json_text, double epsilon = 1e-6);
std::vector<Candidate> load_candidates(const std::filesystem::path& path, double epsilon = 1e-6);
std::string dump_candidates(const std::vector<Candidate>& cands);

/// Candidates with their mask box and rasterized pixel count, the nms subcommand output.
std::string dump_assembled(const std::vector<AssembledMask>& masks);

/// Plain PBM (P1) dump of a mask.
std::string to_pbm(const BitMask& mask);

}  // namespace polarmask
