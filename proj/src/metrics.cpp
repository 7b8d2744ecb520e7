#include "meetkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "meetkit/assignment.hpp"
#include "meetkit/error.hpp"

namespace meetkit {

namespace {

enum Move : uint8_t { kDiag = 0, kDel = 1, kIns = 2 };

} // namespace

CerBreakdown cer_chars(const std::vector<char32_t>& ref, const std::vector<char32_t>& hyp) {
    const size_t n = ref.size();
    const size_t m = hyp.size();
    if (n == 0 && m > 0)
        throw Error("EmptyReference", "CER is undefined for an empty reference");

    CerBreakdown out;
    out.ref_length = static_cast<long long>(n);
    if (n == 0)
        return out;

    // rolling distance rows + full move matrix for the backtrace
    std::vector<long long> prev(m + 1), cur(m + 1);
    std::vector<uint8_t> moves((n + 1) * (m + 1));
    auto move_at = [&](size_t i, size_t j) -> uint8_t& { return moves[i * (m + 1) + j]; };

    for (size_t j = 0; j <= m; ++j) {
        prev[j] = static_cast<long long>(j);
        move_at(0, j) = kIns;
    }
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<long long>(i);
        move_at(i, 0) = kDel;
        for (size_t j = 1; j <= m; ++j) {
            long long diag = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
            long long del = prev[j] + 1;
            long long ins = cur[j - 1] + 1;
            // substitution preferred over deletion over insertion on ties
            long long best = diag;
            uint8_t mv = kDiag;
            if (del < best) {
                best = del;
                mv = kDel;
            }
            if (ins < best) {
                best = ins;
                mv = kIns;
            }
            cur[j] = best;
            move_at(i, j) = mv;
        }
        std::swap(prev, cur);
    }

    size_t i = n, j = m;
    while (i > 0 || j > 0) {
        switch (move_at(i, j)) {
        case kDiag:
            if (ref[i - 1] != hyp[j - 1])
                ++out.substitutions;
            --i;
            --j;
            break;
        case kDel:
            ++out.deletions;
            --i;
            break;
        default:
            ++out.insertions;
            --j;
            break;
        }
    }
    out.cer = static_cast<double>(out.distance()) / static_cast<double>(out.ref_length);
    return out;
}

CerBreakdown cer(std::string_view ref, std::string_view hyp) {
    return cer_chars(normalize_chars(ref, TextNorm::Whitespace),
                     normalize_chars(hyp, TextNorm::Whitespace));
}

long long edit_distance(const std::vector<char32_t>& a, const std::vector<char32_t>& b) {
    const size_t n = a.size(), m = b.size();
    std::vector<long long> prev(m + 1), cur(m + 1);
    for (size_t j = 0; j <= m; ++j)
        prev[j] = static_cast<long long>(j);
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<long long>(i);
        for (size_t j = 1; j <= m; ++j)
            cur[j] = std::min({prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1), prev[j] + 1,
                               cur[j - 1] + 1});
        std::swap(prev, cur);
    }
    return prev[m];
}

// ---------------------------------------------------------------------------
// DER
// ---------------------------------------------------------------------------

namespace {

struct Region {
    double start;
    double end;
    std::set<std::string> ref_active;
    std::set<std::string> hyp_active;
};

// Cuts the union timeline of ref/hyp segments and collar boundaries into
// atomic regions with constant speaker sets, dropping unscored regions.
std::vector<Region> scored_regions(const Annotation& ref, const Annotation& hyp, double collar,
                                   bool score_overlap) {
    std::vector<double> cuts;
    auto add_segment_cuts = [&cuts](const Annotation& ann) {
        for (const auto& seg : ann.segments) {
            cuts.push_back(seg.start);
            cuts.push_back(seg.end());
        }
    };
    add_segment_cuts(ref);
    add_segment_cuts(hyp);

    std::vector<std::pair<double, double>> collars;
    if (collar > 0.0) {
        for (const auto& seg : ref.segments) {
            collars.push_back({seg.start - collar, seg.start + collar});
            collars.push_back({seg.end() - collar, seg.end() + collar});
        }
        for (const auto& c : collars) {
            cuts.push_back(c.first);
            cuts.push_back(c.second);
        }
    }
    if (cuts.empty())
        return {};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Region> regions;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Region r{cuts[i], cuts[i + 1], {}, {}};
        if (r.end - r.start <= 0.0)
            continue;
        double mid = 0.5 * (r.start + r.end);
        bool in_collar = std::any_of(collars.begin(), collars.end(), [mid](const auto& c) {
            return mid > c.first && mid < c.second;
        });
        if (in_collar)
            continue;
        for (const auto& seg : ref.segments)
            if (seg.start <= mid && mid < seg.end())
                r.ref_active.insert(seg.speaker);
        for (const auto& seg : hyp.segments)
            if (seg.start <= mid && mid < seg.end())
                r.hyp_active.insert(seg.speaker);
        if (!score_overlap && r.ref_active.size() >= 2)
            continue;
        if (r.ref_active.empty() && r.hyp_active.empty())
            continue;
        regions.push_back(std::move(r));
    }
    return regions;
}

} // namespace

DerBreakdown der(const Annotation& ref, const Annotation& hyp, double collar, bool score_overlap) {
    if (ref.recording_id != hyp.recording_id)
        throw Error("RecordingMismatch", "ref recording '" + ref.recording_id +
                                             "' vs hyp recording '" + hyp.recording_id + "'");
    if (collar < 0.0)
        throw Error("InvalidCollar", "collar must be >= 0");

    std::vector<Region> regions = scored_regions(ref, hyp, collar, score_overlap);

    std::vector<std::string> ref_spk = ref.speakers();
    std::vector<std::string> hyp_spk = hyp.speakers();
    std::map<std::string, size_t> ref_idx, hyp_idx;
    for (size_t i = 0; i < ref_spk.size(); ++i)
        ref_idx[ref_spk[i]] = i;
    for (size_t j = 0; j < hyp_spk.size(); ++j)
        hyp_idx[hyp_spk[j]] = j;

    // total co-occurrence time over scored regions drives the optimal mapping
    std::vector<int> map_ref_to_hyp(ref_spk.size(), -1);
    if (!ref_spk.empty() && !hyp_spk.empty()) {
        std::vector<std::vector<double>> overlap(ref_spk.size(),
                                                 std::vector<double>(hyp_spk.size(), 0.0));
        for (const auto& r : regions) {
            double dur = r.end - r.start;
            for (const auto& rs : r.ref_active)
                for (const auto& hs : r.hyp_active)
                    overlap[ref_idx[rs]][hyp_idx[hs]] += dur;
        }
        AssignmentResult asg = solve_assignment_max(overlap);
        for (size_t i = 0; i < ref_spk.size(); ++i) {
            int j = asg.row_to_col[i];
            if (j >= 0 && overlap[i][j] > 0.0)
                map_ref_to_hyp[i] = j;
        }
    }

    DerBreakdown out;
    for (const auto& r : regions) {
        double dur = r.end - r.start;
        auto n_ref = static_cast<double>(r.ref_active.size());
        auto n_hyp = static_cast<double>(r.hyp_active.size());
        double n_correct = 0.0;
        for (const auto& rs : r.ref_active) {
            int j = map_ref_to_hyp[ref_idx[rs]];
            if (j >= 0 && r.hyp_active.count(hyp_spk[j]))
                n_correct += 1.0;
        }
        out.missed += dur * std::max(0.0, n_ref - n_hyp);
        out.false_alarm += dur * std::max(0.0, n_hyp - n_ref);
        out.confusion += dur * (std::min(n_ref, n_hyp) - n_correct);
        out.scored_speech += dur * n_ref;
    }
    double errors = out.missed + out.false_alarm + out.confusion;
    if (out.scored_speech > 0.0)
        out.der = errors / out.scored_speech;
    else
        out.der = errors > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// cpCER
// ---------------------------------------------------------------------------

void Transcript::sort_utterances() {
    std::stable_sort(utterances.begin(), utterances.end(),
                     [](const Utterance& a, const Utterance& b) {
                         if (a.start != b.start)
                             return a.start < b.start;
                         return a.speaker < b.speaker;
                     });
}

namespace {

// per-speaker concatenation in start-time order
std::map<std::string, std::vector<char32_t>> concatenate_by_speaker(const Transcript& t,
                                                                    TextNorm norm) {
    Transcript sorted = t;
    sorted.sort_utterances();
    std::map<std::string, std::vector<char32_t>> out;
    for (const auto& utt : sorted.utterances) {
        std::vector<char32_t> chars = normalize_chars(utt.text, norm);
        auto& dst = out[utt.speaker];
        dst.insert(dst.end(), chars.begin(), chars.end());
    }
    return out;
}

} // namespace

CpcerResult cpcer(const Transcript& ref, const Transcript& hyp, TextNorm norm) {
    auto ref_cat = concatenate_by_speaker(ref, norm);
    auto hyp_cat = concatenate_by_speaker(hyp, norm);

    long long ref_chars = 0;
    for (const auto& [spk, chars] : ref_cat)
        ref_chars += static_cast<long long>(chars.size());
    if (ref.utterances.empty() || ref_chars == 0)
        throw Error("EmptyReference", "reference transcript has no scoreable characters");

    std::vector<const std::string*> ref_spk, hyp_spk;
    for (const auto& [spk, chars] : ref_cat)
        ref_spk.push_back(&spk);
    for (const auto& [spk, chars] : hyp_cat)
        hyp_spk.push_back(&spk);

    // square matrix padded with dummy rows/cols so unmatched speakers pay
    // their full length (deletions for ref, insertions for hyp)
    const size_t R = ref_spk.size(), H = hyp_spk.size();
    const size_t n = std::max(R, H);
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i < R && j < H)
                cost[i][j] = static_cast<double>(
                    edit_distance(ref_cat.at(*ref_spk[i]), hyp_cat.at(*hyp_spk[j])));
            else if (i < R)
                cost[i][j] = static_cast<double>(ref_cat.at(*ref_spk[i]).size());
            else if (j < H)
                cost[i][j] = static_cast<double>(hyp_cat.at(*hyp_spk[j]).size());
        }
    }

    AssignmentResult asg = solve_assignment_min(cost);
    CpcerResult out;
    out.ref_chars = ref_chars;
    out.total_cost = static_cast<long long>(std::llround(asg.total_cost));
    for (size_t i = 0; i < R; ++i) {
        int j = asg.row_to_col[i];
        if (j >= 0 && static_cast<size_t>(j) < H)
            out.mapping.push_back({*ref_spk[i], *hyp_spk[static_cast<size_t>(j)]});
    }
    out.cpcer = static_cast<double>(out.total_cost) / static_cast<double>(ref_chars);
    return out;
}

// ---------------------------------------------------------------------------
// Transcript JSONL
// ---------------------------------------------------------------------------

std::vector<Transcript> parse_transcript_jsonl(std::string_view text) {
    std::vector<Transcript> transcripts;
    std::map<std::string, size_t> index;

    size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("MalformedLine", "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("recording_id") || !j.contains("speaker") || !j.contains("start") ||
            !j.contains("text"))
            throw Error("MalformedLine", "line " + std::to_string(line_no) +
                                             ": missing recording_id/speaker/start/text");
        std::string rec = j["recording_id"].get<std::string>();
        auto it = index.find(rec);
        if (it == index.end()) {
            it = index.emplace(rec, transcripts.size()).first;
            transcripts.push_back(Transcript{rec, {}});
        }
        transcripts[it->second].utterances.push_back(Utterance{
            j["speaker"].get<std::string>(), j["start"].get<double>(), j["text"].get<std::string>()});
    }
    for (auto& t : transcripts)
        t.sort_utterances();
    return transcripts;
}

std::string write_transcript_jsonl(const std::vector<Transcript>& transcripts) {
    std::string out;
    for (const auto& t : transcripts) {
        for (const auto& utt : t.utterances) {
            nlohmann::ordered_json j;
            j["recording_id"] = t.recording_id;
            j["speaker"] = utt.speaker;
            j["start"] = utt.start;
            j["text"] = utt.text;
            out += j.dump();
            out += '\n';
        }
    }
    return out;
}

std::vector<Transcript> read_transcript_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileNotFound", "cannot open transcript file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_transcript_jsonl(ss.str());
}

} // namespace meetkit
