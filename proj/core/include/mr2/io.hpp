#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mr2/evaluation.hpp"
#include "mr2/pipeline.hpp"
#include "mr2/types.hpp"

namespace mr2 {

// Newline-delimited JSON records. Readers skip blank lines and throw
// ParseError carrying the 1-based line number of the first bad record.

/// {"sequence_id", "frame", "inference_resolution": [w, h],
///  "native_resolution": [w, h], "detections": [{"bbox", "class", "conf"}]}
/// Boxes are in inference-resolution pixels.
struct DetectionRecord {
    std::string sequence_id;
    FramePacket packet;

    bool operator==(const DetectionRecord&) const = default;
};

/// {"sequence_id", "frame", "tracks": [{"id", "bbox", "class", "conf"}]}
/// Boxes are in native-resolution pixels.
struct TrackRecord {
    std::string sequence_id;
    std::int64_t frame = 0;
    std::vector<TrackOutput> tracks;

    bool operator==(const TrackRecord&) const = default;
};

/// {"sequence_id", "frame", "objects": [{"bbox", "class"}]}, native pixels.
struct GroundTruthRecord {
    std::string sequence_id;
    GroundTruthFrame frame;

    bool operator==(const GroundTruthRecord&) const = default;
};

std::string to_json_line(const DetectionRecord& rec);
std::string to_json_line(const TrackRecord& rec);
std::string to_json_line(const GroundTruthRecord& rec);

DetectionRecord parse_detection_record(std::string_view line, long line_no = -1);
TrackRecord parse_track_record(std::string_view line, long line_no = -1);
GroundTruthRecord parse_ground_truth_record(std::string_view line, long line_no = -1);

std::vector<DetectionRecord> read_detections(std::istream& in);
std::vector<TrackRecord> read_tracks(std::istream& in);
std::vector<GroundTruthRecord> read_ground_truth(std::istream& in);

std::vector<DetectionRecord> read_detection_file(const std::filesystem::path& path);
std::vector<TrackRecord> read_track_file(const std::filesystem::path& path);
std::vector<GroundTruthRecord> read_ground_truth_file(const std::filesystem::path& path);

enum class RecordKind { Empty, Detections, Tracks };
/// Inspects the first non-blank line of a prediction file.
RecordKind sniff_record_kind(const std::filesystem::path& path);

template <typename Record>
void write_records(std::ostream& out, const std::vector<Record>& records) {
    for (const auto& r : records) out << to_json_line(r) << '\n';
}

template <typename Record>
void write_record_file(const std::filesystem::path& path, const std::vector<Record>& records);

/// Records of one sequence in file order.
template <typename Record>
struct SequenceGroup {
    std::string sequence_id;
    std::vector<Record> records;
};

/// Groups by sequence id in order of first appearance. Throws
/// ValidationError when frames within a sequence are not strictly increasing.
std::vector<SequenceGroup<DetectionRecord>> group_detections(std::vector<DetectionRecord> records);
std::vector<SequenceGroup<TrackRecord>> group_tracks(std::vector<TrackRecord> records);
std::vector<SequenceGroup<GroundTruthRecord>> group_ground_truth(
    std::vector<GroundTruthRecord> records);

}  // namespace mr2
