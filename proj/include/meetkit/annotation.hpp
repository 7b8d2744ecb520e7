#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace meetkit {

// One RTTM SPEAKER row: [start, start + duration) attributed to one speaker.
struct Segment {
    double start = 0.0;    // seconds, >= 0
    double duration = 0.0; // seconds, > 0
    std::string speaker;

    double end() const { return start + duration; }

    friend bool operator==(const Segment& a, const Segment& b) {
        return a.start == b.start && a.duration == b.duration && a.speaker == b.speaker;
    }
};

// Speaker-labeled timeline of one recording, segments sorted by (start, speaker).
struct Annotation {
    std::string recording_id;
    std::vector<Segment> segments;

    void sort_segments();
    std::vector<std::string> speakers() const; // distinct labels, sorted

    friend bool operator==(const Annotation& a, const Annotation& b) {
        return a.recording_id == b.recording_id && a.segments == b.segments;
    }
};

struct OverlapStats {
    double overlap_duration = 0.0; // time with >= 2 distinct active speakers
    double speech_duration = 0.0;  // time with >= 1 active speaker
    double ratio = 0.0;            // overlap / speech, 0 when no speech
};

// Parses RTTM text into one Annotation per distinct recording id (ordered by
// first appearance). Lines must be SPEAKER rows with >= 9 whitespace-separated
// fields. Throws Error("MalformedLine") / Error("NonPositiveDuration") with
// the 1-based line number.
std::vector<Annotation> parse_rttm(std::string_view text);

// Serializes annotations as RTTM with 2-decimal second fields. Inverse of
// parse_rttm up to that formatting precision.
std::string write_rttm(const std::vector<Annotation>& annotations);
std::string write_rttm(const Annotation& annotation);

std::vector<Annotation> read_rttm_file(const std::string& path);
void write_rttm_file(const std::vector<Annotation>& annotations, const std::string& path);

// Exact boundary-event sweep; no frame quantization. Overlapping segments of
// the same speaker count as one active speaker.
OverlapStats overlap_ratio(const Annotation& annotation);

} // namespace meetkit
