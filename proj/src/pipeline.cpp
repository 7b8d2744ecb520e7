#include "meetkit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "meetkit/error.hpp"
#include "meetkit/oa.hpp"

namespace meetkit {

namespace fs = std::filesystem;

std::string hybrid_select(const OverlapStats& stats, const HybridPolicy& policy) {
    return stats.ratio < policy.overlap_threshold ? policy.low_overlap_system
                                                  : policy.high_overlap_system;
}

SegmentationReport segment_audio(const WaveBuffer& audio, const Annotation& ann, double min_dur) {
    if (ann.segments.empty())
        throw Error("EmptyAnnotation", "no segments to cut for " + ann.recording_id);

    SegmentationReport report;
    const auto total = static_cast<long long>(audio.num_samples());
    for (const auto& seg : ann.segments) {
        long long s0 = std::llround(seg.start * audio.sample_rate);
        long long s1 = std::llround(seg.end() * audio.sample_rate);
        if (s0 < 0)
            s0 = 0;
        if (s1 > total) {
            s1 = total;
            ++report.clipped;
        }
        double cut_dur = static_cast<double>(s1 - s0) / audio.sample_rate;
        if (s1 <= s0 || cut_dur < min_dur) {
            ++report.skipped_short;
            continue;
        }
        // centisecond-resolution id keeps names stable across runs
        char id[256];
        std::snprintf(id, sizeof(id), "%s-%s-%07lld-%07lld", ann.recording_id.c_str(),
                      seg.speaker.c_str(), std::llround(seg.start * 100.0),
                      std::llround(seg.end() * 100.0));
        report.cuts.push_back(UtteranceCut{
            id, seg.speaker, seg.start,
            slice(audio, static_cast<size_t>(s0), static_cast<size_t>(s1 - s0))});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Cascade
// ---------------------------------------------------------------------------

CascadeConfig CascadeConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("FileNotFound", "cannot open cascade config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidConfig", std::string("bad config JSON: ") + e.what());
    }

    CascadeConfig cfg;
    try {
        cfg.audio_root = j.at("audio_root").get<std::string>();
        for (const auto& [tag, p] : j.at("rttm_source").items())
            cfg.rttm_source.push_back({tag, p.get<std::string>()});
        cfg.asr_command = j.at("asr_command").get<std::string>();
        cfg.ref_transcripts = j.at("ref_transcripts").get<std::string>();
        cfg.workdir = j.at("workdir").get<std::string>();
        cfg.parallelism = j.value("parallelism", 4);
        cfg.policy.overlap_threshold = j.value("overlap_threshold", 0.01);
        cfg.min_utt_dur = j.value("min_utt_dur", 0.2);
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidConfig", std::string("incomplete config: ") + e.what());
    }
    if (cfg.asr_command.find("{wav}") == std::string::npos)
        throw Error("InvalidConfig", "asr_command must contain the {wav} placeholder");
    std::sort(cfg.rttm_source.begin(), cfg.rttm_source.end());

    if (const char* env = std::getenv("MEETKIT_PARALLELISM")) {
        int p = std::atoi(env);
        if (p > 0)
            cfg.parallelism = p;
    }
    return cfg;
}

namespace {

struct HypEntry {
    std::string speaker;
    double start = 0.0;
    std::string text;
    bool failed = false;
};

// hyps/<rec>.jsonl rows keyed by utterance id; rewritten sorted after each
// batch so reruns reproduce identical bytes
std::map<std::string, HypEntry> load_hyps(const fs::path& path) {
    std::map<std::string, HypEntry> out;
    std::ifstream in(path);
    if (!in)
        return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            continue;
        }
        if (!j.contains("utt_id"))
            continue;
        HypEntry e;
        e.speaker = j.value("speaker", "");
        e.start = j.value("start", 0.0);
        e.text = j.value("text", "");
        e.failed = j.value("failed", false);
        out[j["utt_id"].get<std::string>()] = std::move(e);
    }
    return out;
}

void save_hyps(const fs::path& path, const std::map<std::string, HypEntry>& hyps,
               const std::string& recording_id) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("IoError", "cannot write hypothesis file: " + path.string());
    for (const auto& [utt_id, e] : hyps) {
        nlohmann::ordered_json j;
        j["utt_id"] = utt_id;
        j["recording_id"] = recording_id;
        j["speaker"] = e.speaker;
        j["start"] = e.start;
        j["text"] = e.text;
        if (e.failed)
            j["failed"] = true;
        out << j.dump() << '\n';
    }
}

} // namespace

std::string CascadeReport::to_json() const {
    nlohmann::ordered_json j;
    auto recs = nlohmann::ordered_json::array();
    for (const auto& r : recordings) {
        nlohmann::ordered_json e;
        e["recording_id"] = r.recording_id;
        e["system"] = r.system;
        e["overlap_ratio"] = r.overlap_ratio;
        e["cpcer"] = r.cpcer;
        e["edit_cost"] = r.total_cost;
        e["ref_chars"] = r.ref_chars;
        e["utterances"] = r.utterances;
        e["oracle_failures"] = r.oracle_failures;
        recs.push_back(std::move(e));
    }
    j["recordings"] = std::move(recs);
    j["overall_cpcer"] = overall_cpcer;
    j["edit_cost"] = total_cost;
    j["ref_chars"] = ref_chars;
    j["failures"] = failures;
    return j.dump(2);
}

CascadeReport run_cascade(const CascadeConfig& cfg) {
    // configuration problems abort; per-utterance problems degrade
    std::vector<Transcript> refs = read_transcript_file(cfg.ref_transcripts);
    if (refs.empty())
        throw Error("EmptyReference", "reference transcript file has no utterances");

    std::map<std::string, std::map<std::string, Annotation>> rttms; // tag -> rec -> ann
    for (const auto& [tag, path] : cfg.rttm_source) {
        for (auto& ann : read_rttm_file(path))
            rttms[tag][ann.recording_id] = std::move(ann);
    }
    if (rttms.empty())
        throw Error("InvalidConfig", "no RTTM sources configured");

    fs::path work(cfg.workdir);
    fs::create_directories(work / "segments");
    fs::create_directories(work / "hyps");

    CommandOracle oracle(cfg.asr_command);
    CascadeReport report;

    std::sort(refs.begin(), refs.end(),
              [](const Transcript& a, const Transcript& b) { return a.recording_id < b.recording_id; });

    for (const auto& ref : refs) {
        const std::string& rec = ref.recording_id;

        // the overlap statistic comes from the overlap-aware system's output
        const std::string& stats_tag = cfg.policy.high_overlap_system;
        auto tag_it = rttms.find(stats_tag);
        if (tag_it == rttms.end() || !tag_it->second.count(rec)) {
            report.failures.push_back(rec + ": no '" + stats_tag + "' RTTM to compute overlap");
            continue;
        }
        OverlapStats stats = overlap_ratio(tag_it->second.at(rec));
        std::string system = hybrid_select(stats, cfg.policy);

        auto sys_it = rttms.find(system);
        if (sys_it == rttms.end() || !sys_it->second.count(rec)) {
            report.failures.push_back(rec + ": no '" + system + "' RTTM for selected system");
            continue;
        }
        const Annotation& ann = sys_it->second.at(rec);

        fs::path wav_path = fs::path(cfg.audio_root) / (rec + ".wav");
        if (!fs::exists(wav_path)) {
            report.failures.push_back(rec + ": missing audio " + wav_path.string());
            continue;
        }
        WaveBuffer audio = read_wav(wav_path.string());
        SegmentationReport seg = segment_audio(audio, ann, cfg.min_utt_dur);

        fs::path hyp_path = work / "hyps" / (rec + ".jsonl");
        std::map<std::string, HypEntry> hyps = load_hyps(hyp_path);

        std::vector<const UtteranceCut*> todo;
        for (const auto& cut : seg.cuts)
            if (!hyps.count(cut.utt_id))
                todo.push_back(&cut);

        fs::path seg_dir = work / "segments" / rec;
        if (!todo.empty())
            fs::create_directories(seg_dir);

        std::mutex mu;
        std::atomic<size_t> cursor{0};
        auto worker = [&]() {
            for (;;) {
                size_t idx = cursor.fetch_add(1);
                if (idx >= todo.size())
                    return;
                const UtteranceCut& cut = *todo[idx];
                fs::path cut_path = seg_dir / (cut.utt_id + ".wav");
                HypEntry entry;
                entry.speaker = cut.speaker;
                entry.start = cut.start;
                try {
                    write_wav(cut.audio, cut_path.string());
                    entry.text = oracle.transcribe(cut_path.string());
                } catch (const std::exception& e) {
                    entry.text.clear();
                    entry.failed = true;
                    std::lock_guard<std::mutex> lock(mu);
                    report.failures.push_back(cut.utt_id + ": " + e.what());
                }
                std::lock_guard<std::mutex> lock(mu);
                hyps[cut.utt_id] = std::move(entry);
            }
        };
        int pool = std::max(1, std::min<int>(cfg.parallelism, static_cast<int>(todo.size())));
        if (pool <= 1) {
            worker();
        } else {
            std::vector<std::thread> threads;
            for (int i = 0; i < pool; ++i)
                threads.emplace_back(worker);
            for (auto& th : threads)
                th.join();
        }
        report.oracle_calls += static_cast<int>(todo.size());
        if (!todo.empty())
            save_hyps(hyp_path, hyps, rec);

        Transcript hyp;
        hyp.recording_id = rec;
        int rec_failures = 0;
        for (const auto& [utt_id, e] : hyps) {
            if (e.failed)
                ++rec_failures;
            hyp.utterances.push_back(Utterance{e.speaker, e.start, e.text});
        }
        hyp.sort_utterances();

        RecordingReport rr;
        rr.recording_id = rec;
        rr.system = system;
        rr.overlap_ratio = stats.ratio;
        rr.utterances = static_cast<int>(hyp.utterances.size());
        rr.oracle_failures = rec_failures;
        CpcerResult scored = cpcer(ref, hyp);
        rr.cpcer = scored.cpcer;
        rr.total_cost = scored.total_cost;
        rr.ref_chars = scored.ref_chars;
        report.recordings.push_back(std::move(rr));
    }

    for (const auto& r : report.recordings) {
        report.total_cost += r.total_cost;
        report.ref_chars += r.ref_chars;
    }
    report.overall_cpcer = report.ref_chars > 0
                               ? static_cast<double>(report.total_cost) / report.ref_chars
                               : 0.0;
    std::sort(report.failures.begin(), report.failures.end());

    std::ofstream out(work / "report.json", std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("IoError", "cannot write cascade report");
    out << report.to_json() << '\n';
    return report;
}

} // namespace meetkit
