#include "polarmask/io.hpp"

#include "polarmask/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace polarmask {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& id, const std::string& reason) {
    throw Error(ErrorKind::ParseError, "entry '" + id + "': " + reason);
}

json parse_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_array()) throw Error(ErrorKind::ParseError, "top-level value must be a list");
    return doc;
}

double number(const json& v, const std::string& id, const char* field) {
    if (!v.is_number()) parse_fail(id, std::string(field) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) parse_fail(id, std::string(field) + " must be finite");
    return d;
}

int integer(const json& v, const std::string& id, const char* field) {
    if (!v.is_number_integer()) parse_fail(id, std::string(field) + " must be an integer");
    return v.get<int>();
}

std::string entry_id(const json& entry, std::size_t index) {
    if (entry.is_object() && entry.contains("id")) {
        const auto& v = entry["id"];
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
    }
    return "#" + std::to_string(index);
}

RasterSize image_size(const json& entry, const std::string& id) {
    if (!entry.contains("image_size")) parse_fail(id, "missing image_size");
    const auto& v = entry["image_size"];
    if (!v.is_array() || v.size() != 2) parse_fail(id, "image_size must be [height, width]");
    const RasterSize s{integer(v[0], id, "image_size"), integer(v[1], id, "image_size")};
    if (s.height < 1 || s.width < 1) parse_fail(id, "image_size must be positive");
    return s;
}

Point center_of(const json& entry, const std::string& id) {
    if (!entry.contains("center")) parse_fail(id, "missing center");
    const auto& v = entry["center"];
    if (!v.is_array() || v.size() != 2) parse_fail(id, "center must be [x, y]");
    return {number(v[0], id, "center"), number(v[1], id, "center")};
}

std::vector<double> rays_of(const json& entry, const std::string& id) {
    if (!entry.contains("rays") || !entry["rays"].is_array()) parse_fail(id, "missing rays list");
    std::vector<double> rays;
    for (const auto& r : entry["rays"]) rays.push_back(number(r, id, "rays"));
    if (rays.size() < 3) parse_fail(id, "need at least 3 rays");
    return rays;
}

PolarInstance polar_of(const json& entry, const std::string& id, double epsilon) {
    auto rays = rays_of(entry, id);
    const int n = static_cast<int>(rays.size());
    try {
        return PolarInstance(center_of(entry, id), AngleGrid(n), std::move(rays), epsilon);
    } catch (const Error& e) {
        parse_fail(id, e.what());
    }
}

json point_list(std::span<const Point> pts) {
    json flat = json::array();
    for (const auto& p : pts) {
        flat.push_back(p.x);
        flat.push_back(p.y);
    }
    return flat;
}

json polar_fields(const PolarInstance& p) {
    json j;
    j["center"] = {p.center().x, p.center().y};
    j["rays"] = std::vector<double>(p.rays().begin(), p.rays().end());
    return j;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
        out << contents;
        if (!out.flush()) throw Error(ErrorKind::IoError, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot rename onto " + path.string());
    }
}

Corpus parse_instances(const std::string& json_text) {
    const json doc = parse_document(json_text);
    Corpus corpus;
    corpus.source = CorpusSource::File;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& entry = doc[i];
        const std::string id = entry_id(entry, i);
        if (!entry.is_object()) parse_fail(id, "entry must be an object");
        if (!seen.insert(id).second) parse_fail(id, "duplicate id");
        if (!entry.contains("polygon")) parse_fail(id, "missing polygon");
        const json& poly = entry["polygon"];
        if (poly.is_object()) parse_fail(id, "RLE segmentations are not supported");
        if (!poly.is_array()) parse_fail(id, "polygon must be a flat coordinate list");
        if (!poly.empty() && poly[0].is_array()) parse_fail(id, "multi-polygon instances are not supported");
        if (poly.size() % 2 != 0) parse_fail(id, "polygon has an odd number of coordinates");
        if (poly.size() < 6) parse_fail(id, "polygon needs at least 3 points");
        std::vector<Point> pts;
        for (std::size_t k = 0; k < poly.size(); k += 2) {
            pts.push_back({number(poly[k], id, "polygon"), number(poly[k + 1], id, "polygon")});
        }
        const RasterSize size = image_size(entry, id);
        const int category = entry.contains("category") ? integer(entry["category"], id, "category") : 0;
        try {
            corpus.instances.push_back(CorpusItem{id, Contour(std::move(pts)), size, category});
        } catch (const Error& e) {
            parse_fail(id, e.what());
        }
    }
    return corpus;
}

Corpus load_instances(const std::filesystem::path& path) { return parse_instances(read_file(path)); }

std::string dump_instances(const Corpus& corpus) {
    json doc = json::array();
    for (const auto& it : corpus.instances) {
        json j;
        j["id"] = it.id;
        j["image_size"] = {it.image_size.height, it.image_size.width};
        j["polygon"] = point_list(it.contour.points());
        j["category"] = it.category;
        doc.push_back(std::move(j));
    }
    return doc.dump(1) + "\n";
}

void save_instances(const Corpus& corpus, const std::filesystem::path& path) {
    write_file_atomic(path, dump_instances(corpus));
}

std::vector<EncodedInstance> parse_polar(const std::string& json_text, double epsilon) {
    const json doc = parse_document(json_text);
    std::vector<EncodedInstance> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& entry = doc[i];
        const std::string id = entry_id(entry, i);
        if (!entry.is_object()) parse_fail(id, "entry must be an object");
        const int category = entry.contains("category") ? integer(entry["category"], id, "category") : 0;
        out.push_back({id, image_size(entry, id), category, polar_of(entry, id, epsilon)});
    }
    return out;
}

std::vector<EncodedInstance> load_polar(const std::filesystem::path& path, double epsilon) {
    return parse_polar(read_file(path), epsilon);
}

std::string dump_polar(const std::vector<EncodedInstance>& items) {
    json doc = json::array();
    for (const auto& it : items) {
        json j = polar_fields(it.polar);
        j["id"] = it.id;
        j["image_size"] = {it.image_size.height, it.image_size.width};
        j["category"] = it.category;
        doc.push_back(std::move(j));
    }
    return doc.dump(1) + "\n";
}

std::vector<Candidate> parse_candidates(const std::string& json_text, double epsilon) {
    const json doc = parse_document(json_text);
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& entry = doc[i];
        const std::string id = entry_id(entry, i);
        if (!entry.is_object()) parse_fail(id, "entry must be an object");
        for (const char* key : {"class_score", "centerness", "level", "category"}) {
            if (!entry.contains(key)) parse_fail(id, std::string("missing ") + key);
        }
        Candidate c{polar_of(entry, id, epsilon), number(entry["class_score"], id, "class_score"),
                    number(entry["centerness"], id, "centerness"), integer(entry["level"], id, "level"),
                    integer(entry["category"], id, "category"), i};
        if (!(c.class_score >= 0.0 && c.class_score <= 1.0)) parse_fail(id, "class_score outside [0, 1]");
        if (!(c.centerness > 0.0 && c.centerness <= 1.0)) parse_fail(id, "centerness outside (0, 1]");
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> load_candidates(const std::filesystem::path& path, double epsilon) {
    return parse_candidates(read_file(path), epsilon);
}

namespace {

json candidate_json(const Candidate& c) {
    json j = polar_fields(c.instance);
    j["class_score"] = c.class_score;
    j["centerness"] = c.centerness;
    j["level"] = c.level;
    j["category"] = c.category;
    return j;
}

}  // namespace

std::string dump_candidates(const std::vector<Candidate>& cands) {
    json doc = json::array();
    for (const auto& c : cands) doc.push_back(candidate_json(c));
    return doc.dump(1) + "\n";
}

std::string dump_assembled(const std::vector<AssembledMask>& masks) {
    json doc = json::array();
    for (const auto& m : masks) {
        json j = candidate_json(m.candidate);
        const Box b = mask_bbox(m.candidate.instance);
        j["score"] = m.candidate.score();
        j["bbox"] = {b.x_min, b.y_min, b.x_max, b.y_max};
        j["mask_area"] = m.mask.count();
        doc.push_back(std::move(j));
    }
    return doc.dump(1) + "\n";
}

std::string to_pbm(const BitMask& mask) {
    std::string out = "P1\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n";
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (c) out += ' ';
            out += mask.at(r, c) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

}  // namespace polarmask
