#include "meetkit/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "meetkit/error.hpp"

namespace meetkit {

namespace {

bool parse_seconds(const std::string& field, double* out) {
    try {
        size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size() || !std::isfinite(v))
            return false;
        *out = v;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream iss(line);
    std::string f;
    while (iss >> f)
        fields.push_back(f);
    return fields;
}

} // namespace

void Annotation::sort_segments() {
    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
        if (a.start != b.start)
            return a.start < b.start;
        if (a.speaker != b.speaker)
            return a.speaker < b.speaker;
        return a.duration < b.duration;
    });
}

std::vector<std::string> Annotation::speakers() const {
    std::set<std::string> uniq;
    for (const auto& seg : segments)
        uniq.insert(seg.speaker);
    return {uniq.begin(), uniq.end()};
}

std::vector<Annotation> parse_rttm(std::string_view text) {
    std::vector<Annotation> annotations;
    std::map<std::string, size_t> index; // recording id -> position

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                        : eol - pos));
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        std::vector<std::string> fields = split_fields(line);
        if (fields.empty())
            continue;
        if (fields.size() < 9 || fields[0] != "SPEAKER")
            throw Error("MalformedLine", "line " + std::to_string(line_no) +
                                             ": expected >= 9 fields starting with SPEAKER");

        double start = 0.0, duration = 0.0;
        if (!parse_seconds(fields[3], &start) || !parse_seconds(fields[4], &duration) || start < 0.0)
            throw Error("MalformedLine",
                        "line " + std::to_string(line_no) + ": bad start/duration field");
        if (duration <= 0.0)
            throw Error("NonPositiveDuration",
                        "line " + std::to_string(line_no) + ": duration must be > 0");

        const std::string& rec = fields[1];
        auto it = index.find(rec);
        if (it == index.end()) {
            it = index.emplace(rec, annotations.size()).first;
            annotations.push_back(Annotation{rec, {}});
        }
        // field 6 is the channel; parsed but not used for scoring
        annotations[it->second].segments.push_back(Segment{start, duration, fields[7]});
    }

    for (auto& ann : annotations)
        ann.sort_segments();
    return annotations;
}

std::string write_rttm(const std::vector<Annotation>& annotations) {
    std::string out;
    char buf[64];
    for (const auto& ann : annotations) {
        for (const auto& seg : ann.segments) {
            std::snprintf(buf, sizeof(buf), "%.2f %.2f", seg.start, seg.duration);
            out += "SPEAKER " + ann.recording_id + " 1 " + buf + " <NA> <NA> " + seg.speaker +
                   " <NA> <NA>\n";
        }
    }
    return out;
}

std::string write_rttm(const Annotation& annotation) {
    return write_rttm(std::vector<Annotation>{annotation});
}

std::vector<Annotation> read_rttm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileNotFound", "cannot open RTTM file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_rttm(ss.str());
}

void write_rttm_file(const std::vector<Annotation>& annotations, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("IoError", "cannot write RTTM file: " + path);
    out << write_rttm(annotations);
}

OverlapStats overlap_ratio(const Annotation& annotation) {
    // +1/-1 events per segment keyed by speaker; between consecutive event
    // times the set of active speakers is constant
    std::vector<std::pair<double, std::pair<int, const std::string*>>> events;
    events.reserve(annotation.segments.size() * 2);
    for (const auto& seg : annotation.segments) {
        events.push_back({seg.start, {+1, &seg.speaker}});
        events.push_back({seg.end(), {-1, &seg.speaker}});
    }
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    OverlapStats stats;
    std::map<std::string, int> active;
    int distinct = 0;
    size_t i = 0;
    double prev = events.empty() ? 0.0 : events[0].first;
    while (i < events.size()) {
        double t = events[i].first;
        double span = t - prev;
        if (span > 0.0) {
            if (distinct >= 1)
                stats.speech_duration += span;
            if (distinct >= 2)
                stats.overlap_duration += span;
        }
        while (i < events.size() && events[i].first == t) {
            const auto& [delta, speaker] = events[i].second;
            int& count = active[*speaker];
            if (count == 0 && delta > 0)
                ++distinct;
            count += delta;
            if (count == 0 && delta < 0)
                --distinct;
            ++i;
        }
        prev = t;
    }
    stats.ratio = stats.speech_duration > 0.0 ? stats.overlap_duration / stats.speech_duration : 0.0;
    return stats;
}

} // namespace meetkit
