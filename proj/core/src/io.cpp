#include "mr2/io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "mr2/errors.hpp"

namespace mr2 {
namespace {

using nlohmann::json;

json box_json(const BBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }
json res_json(Resolution r) { return json::array({r.width, r.height}); }

const json& field(const json& obj, const char* key) {
    if (!obj.is_object()) throw std::runtime_error("expected a JSON object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw std::runtime_error(std::string("missing field '") + key + "'");
    return *it;
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw std::runtime_error(std::string(what) + " must be a number");
    return j.get<double>();
}

std::int64_t integer(const json& j, const char* what) {
    if (!j.is_number_integer()) throw std::runtime_error(std::string(what) + " must be an integer");
    return j.get<std::int64_t>();
}

BBox parse_box(const json& j) {
    if (!j.is_array() || j.size() != 4) throw std::runtime_error("bbox must be [x1, y1, x2, y2]");
    BBox b{number(j[0], "bbox"), number(j[1], "bbox"), number(j[2], "bbox"), number(j[3], "bbox")};
    if (!b.valid()) throw std::runtime_error("bbox must be finite with x1 <= x2 and y1 <= y2");
    return b;
}

Resolution parse_res(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw std::runtime_error(std::string(what) + " must be [width, height]");
    const Resolution r{static_cast<int>(integer(j[0], what)), static_cast<int>(integer(j[1], what))};
    if (r.width <= 0 || r.height <= 0)
        throw std::runtime_error(std::string(what) + " must be positive");
    return r;
}

std::string parse_sequence_id(const json& j) {
    const json& s = field(j, "sequence_id");
    if (!s.is_string()) throw std::runtime_error("sequence_id must be a string");
    return s.get<std::string>();
}

std::int64_t parse_frame(const json& j) {
    const std::int64_t f = integer(field(j, "frame"), "frame");
    if (f < 0) throw std::runtime_error("frame must be non-negative");
    return f;
}

double parse_conf(const json& j) {
    const double c = number(field(j, "conf"), "conf");
    if (!(c >= 0.0 && c <= 1.0)) throw std::runtime_error("conf must lie in [0, 1]");
    return c;
}

int parse_class(const json& j) {
    const std::int64_t c = integer(field(j, "class"), "class");
    if (c < 0) throw std::runtime_error("class must be non-negative");
    return static_cast<int>(c);
}

const json& array_field(const json& j, const char* key) {
    const json& a = field(j, key);
    if (!a.is_array()) throw std::runtime_error(std::string(key) + " must be an array");
    return a;
}

template <typename Fn>
auto with_line(std::string_view line, long line_no, Fn fn) {
    try {
        return fn(json::parse(line));
    } catch (const json::exception& e) {
        throw ParseError(e.what(), line_no);
    } catch (const std::runtime_error& e) {
        throw ParseError(e.what(), line_no);
    }
}

template <typename Record, typename Parse>
std::vector<Record> read_lines(std::istream& in, Parse parse) {
    std::vector<Record> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse(line, line_no));
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return in;
}

template <typename Record, typename FrameOf>
std::vector<SequenceGroup<Record>> group(std::vector<Record> records, FrameOf frame_of) {
    std::vector<SequenceGroup<Record>> out;
    std::map<std::string, std::size_t> index;
    for (auto& r : records) {
        auto [it, inserted] = index.try_emplace(r.sequence_id, out.size());
        if (inserted) out.push_back({r.sequence_id, {}});
        auto& g = out[it->second];
        if (!g.records.empty() && frame_of(g.records.back()) >= frame_of(r))
            throw ValidationError("sequence '" + r.sequence_id + "': frame " +
                                  std::to_string(frame_of(r)) + " does not follow frame " +
                                  std::to_string(frame_of(g.records.back())));
        g.records.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::string to_json_line(const DetectionRecord& rec) {
    json dets = json::array();
    for (const auto& d : rec.packet.detections)
        dets.push_back({{"bbox", box_json(d.bbox)}, {"class", d.class_id}, {"conf", d.conf}});
    json j = {{"sequence_id", rec.sequence_id},
              {"frame", rec.packet.frame_index},
              {"inference_resolution", res_json(rec.packet.inference_resolution)},
              {"native_resolution", res_json(rec.packet.native_resolution)},
              {"detections", std::move(dets)}};
    return j.dump();
}

std::string to_json_line(const TrackRecord& rec) {
    json tracks = json::array();
    for (const auto& t : rec.tracks) {
        json o = {{"id", t.track_id}, {"bbox", box_json(t.bbox)}, {"class", t.class_id}, {"conf", t.conf}};
        if (t.coasted) o["coasted"] = true;
        tracks.push_back(std::move(o));
    }
    json j = {{"sequence_id", rec.sequence_id}, {"frame", rec.frame}, {"tracks", std::move(tracks)}};
    return j.dump();
}

std::string to_json_line(const GroundTruthRecord& rec) {
    json objs = json::array();
    for (const auto& o : rec.frame.objects)
        objs.push_back({{"bbox", box_json(o.bbox)}, {"class", o.class_id}});
    json j = {{"sequence_id", rec.sequence_id},
              {"frame", rec.frame.frame_index},
              {"objects", std::move(objs)}};
    return j.dump();
}

DetectionRecord parse_detection_record(std::string_view line, long line_no) {
    return with_line(line, line_no, [](const json& j) {
        DetectionRecord r;
        r.sequence_id = parse_sequence_id(j);
        r.packet.frame_index = parse_frame(j);
        r.packet.inference_resolution = parse_res(field(j, "inference_resolution"), "inference_resolution");
        r.packet.native_resolution = parse_res(field(j, "native_resolution"), "native_resolution");
        for (const auto& d : array_field(j, "detections"))
            r.packet.detections.push_back({parse_box(field(d, "bbox")), parse_class(d), parse_conf(d)});
        return r;
    });
}

TrackRecord parse_track_record(std::string_view line, long line_no) {
    return with_line(line, line_no, [](const json& j) {
        TrackRecord r;
        r.sequence_id = parse_sequence_id(j);
        r.frame = parse_frame(j);
        for (const auto& t : array_field(j, "tracks")) {
            TrackOutput o;
            o.track_id = integer(field(t, "id"), "id");
            o.bbox = parse_box(field(t, "bbox"));
            o.class_id = parse_class(t);
            o.conf = parse_conf(t);
            if (const auto it = t.find("coasted"); it != t.end()) {
                if (!it->is_boolean()) throw std::runtime_error("coasted must be a boolean");
                o.coasted = it->get<bool>();
            }
            r.tracks.push_back(o);
        }
        return r;
    });
}

GroundTruthRecord parse_ground_truth_record(std::string_view line, long line_no) {
    return with_line(line, line_no, [](const json& j) {
        GroundTruthRecord r;
        r.sequence_id = parse_sequence_id(j);
        r.frame.frame_index = parse_frame(j);
        for (const auto& o : array_field(j, "objects"))
            r.frame.objects.push_back({parse_box(field(o, "bbox")), parse_class(o)});
        return r;
    });
}

std::vector<DetectionRecord> read_detections(std::istream& in) {
    return read_lines<DetectionRecord>(in, parse_detection_record);
}
std::vector<TrackRecord> read_tracks(std::istream& in) {
    return read_lines<TrackRecord>(in, parse_track_record);
}
std::vector<GroundTruthRecord> read_ground_truth(std::istream& in) {
    return read_lines<GroundTruthRecord>(in, parse_ground_truth_record);
}

std::vector<DetectionRecord> read_detection_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_detections(in);
}
std::vector<TrackRecord> read_track_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_tracks(in);
}
std::vector<GroundTruthRecord> read_ground_truth_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_ground_truth(in);
}

RecordKind sniff_record_kind(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        return with_line(line, line_no, [](const json& j) {
            if (j.is_object() && j.contains("tracks")) return RecordKind::Tracks;
            if (j.is_object() && j.contains("detections")) return RecordKind::Detections;
            throw std::runtime_error("record has neither 'tracks' nor 'detections'");
        });
    }
    return RecordKind::Empty;
}

template <typename Record>
void write_record_file(const std::filesystem::path& path, const std::vector<Record>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_records(out, records);
    if (!out) throw IoError("error while writing '" + path.string() + "'");
}

template void write_record_file(const std::filesystem::path&, const std::vector<DetectionRecord>&);
template void write_record_file(const std::filesystem::path&, const std::vector<TrackRecord>&);
template void write_record_file(const std::filesystem::path&, const std::vector<GroundTruthRecord>&);

std::vector<SequenceGroup<DetectionRecord>> group_detections(std::vector<DetectionRecord> records) {
    return group(std::move(records), [](const DetectionRecord& r) { return r.packet.frame_index; });
}

std::vector<SequenceGroup<TrackRecord>> group_tracks(std::vector<TrackRecord> records) {
    return group(std::move(records), [](const TrackRecord& r) { return r.frame; });
}

std::vector<SequenceGroup<GroundTruthRecord>> group_ground_truth(
    std::vector<GroundTruthRecord> records) {
    return group(std::move(records), [](const GroundTruthRecord& r) { return r.frame.frame_index; });
}

}  // namespace mr2
