#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "meetkit/annotation.hpp"
#include "meetkit/text.hpp"

namespace meetkit {

struct CerBreakdown {
    long long substitutions = 0;
    long long deletions = 0;
    long long insertions = 0;
    long long ref_length = 0;
    double cer = 0.0;

    long long distance() const { return substitutions + deletions + insertions; }
};

struct DerBreakdown {
    double missed = 0.0;
    double false_alarm = 0.0;
    double confusion = 0.0;
    double scored_speech = 0.0;
    double der = 0.0;
};

struct Utterance {
    std::string speaker;
    double start = 0.0; // seconds
    std::string text;

    friend bool operator==(const Utterance& a, const Utterance& b) {
        return a.speaker == b.speaker && a.start == b.start && a.text == b.text;
    }
};

// Speaker-attributed, time-stamped transcript of one recording, utterances
// sorted by (start, speaker).
struct Transcript {
    std::string recording_id;
    std::vector<Utterance> utterances;

    void sort_utterances();
};

struct CpcerResult {
    double cpcer = 0.0;
    long long total_cost = 0;
    long long ref_chars = 0;
    std::vector<std::pair<std::string, std::string>> mapping; // (ref speaker, hyp speaker)
};

// Character error rate between whitespace-stripped Unicode strings. Among
// minimal alignments the S/D/I split follows a backtrace preferring
// substitution over deletion over insertion. Throws Error("EmptyReference")
// when ref is empty (after stripping) and hyp is not.
CerBreakdown cer(std::string_view ref, std::string_view hyp);
CerBreakdown cer_chars(const std::vector<char32_t>& ref, const std::vector<char32_t>& hyp);

// Plain character edit distance (no breakdown), used where only the cost matters.
long long edit_distance(const std::vector<char32_t>& a, const std::vector<char32_t>& b);

// Diarization error rate with a one-to-one speaker mapping maximizing total
// overlapped time, exact interval arithmetic, +-collar around every reference
// boundary excluded from scoring. score_overlap=false drops regions where two
// or more reference speakers are active.
DerBreakdown der(const Annotation& ref, const Annotation& hyp, double collar = 0.25,
                 bool score_overlap = true);

// Concatenated minimum-permutation CER: per-speaker texts concatenated in
// start-time order; the exact assignment minimizing total edit distance is
// found; unmatched reference/hypothesis speakers cost their full length.
CpcerResult cpcer(const Transcript& ref, const Transcript& hyp,
                  TextNorm norm = TextNorm::Whitespace);

// Transcript JSONL exchange format: one object per line with keys
// recording_id, speaker, start, text. Grouped per recording (ordered by first
// appearance), utterances sorted.
std::vector<Transcript> parse_transcript_jsonl(std::string_view text);
std::string write_transcript_jsonl(const std::vector<Transcript>& transcripts);
std::vector<Transcript> read_transcript_file(const std::string& path);

} // namespace meetkit
