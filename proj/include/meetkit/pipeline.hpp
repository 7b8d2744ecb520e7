#pragma once

#include <string>
#include <vector>

#include "meetkit/annotation.hpp"
#include "meetkit/metrics.hpp"
#include "meetkit/wave.hpp"

namespace meetkit {

struct HybridPolicy {
    double overlap_threshold = 0.01;
    std::string low_overlap_system = "traditional";
    std::string high_overlap_system = "e2e";
};

// Returns the low-overlap system iff ratio < threshold (strict); the boundary
// itself selects the high-overlap system.
std::string hybrid_select(const OverlapStats& stats, const HybridPolicy& policy);

struct UtteranceCut {
    std::string utt_id;
    std::string speaker;
    double start = 0.0;
    WaveBuffer audio;
};

struct SegmentationReport {
    std::vector<UtteranceCut> cuts;
    int clipped = 0;       // segments truncated at the audio end
    int skipped_short = 0; // segments below the minimum duration
};

// One cut per annotation segment with sample-accurate boundaries; segments
// reaching past the audio end are clipped, segments shorter than min_dur
// after clipping are dropped and counted.
SegmentationReport segment_audio(const WaveBuffer& audio, const Annotation& ann,
                                 double min_dur = 0.2);

struct CascadeConfig {
    std::string audio_root;  // <audio_root>/<recording>.wav
    std::vector<std::pair<std::string, std::string>> rttm_source; // system tag -> RTTM path
    std::string asr_command; // must contain {wav}
    std::string ref_transcripts;
    std::string workdir;
    int parallelism = 4;
    HybridPolicy policy;
    double min_utt_dur = 0.2;

    static CascadeConfig from_json_file(const std::string& path);
};

struct RecordingReport {
    std::string recording_id;
    std::string system;
    double overlap_ratio = 0.0;
    double cpcer = 0.0;
    long long total_cost = 0;
    long long ref_chars = 0;
    int utterances = 0;
    int oracle_failures = 0;
};

struct CascadeReport {
    std::vector<RecordingReport> recordings;
    double overall_cpcer = 0.0; // character-weighted across recordings
    long long total_cost = 0;
    long long ref_chars = 0;
    std::vector<std::string> failures;
    int oracle_calls = 0; // fresh ASR invocations this run (0 on a warm rerun)

    std::string to_json() const;
};

// Full Track-3 style cascade: per recording, pick the RTTM by overlap ratio,
// cut utterances, run the external ASR command per cut, assemble a transcript
// and score cpCER against the reference. Hypotheses are persisted under
// workdir (segments/, hyps/, report.json); completed utterances are reused on
// rerun, so a warm second run performs zero oracle calls and reproduces the
// report byte for byte.
CascadeReport run_cascade(const CascadeConfig& cfg);

} // namespace meetkit
