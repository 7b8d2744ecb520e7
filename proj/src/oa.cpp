#include "meetkit/oa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "meetkit/error.hpp"
#include "meetkit/metrics.hpp"

namespace meetkit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Grid and mixing
// ---------------------------------------------------------------------------

MixWeights MixWeights::of(double w1, double w2) {
    double w3 = 1.0 - w1 - w2;
    if (w1 < -1e-12 || w2 < -1e-12 || w3 < -1e-12 || w1 > 1.0 + 1e-12 || w2 > 1.0 + 1e-12)
        throw Error("InvalidWeights", "mix weights must lie in [0,1] with w1 + w2 <= 1");
    MixWeights w;
    w.w1 = std::clamp(w1, 0.0, 1.0);
    w.w2 = std::clamp(w2, 0.0, 1.0);
    w.w3 = 1.0 - w.w1 - w.w2;
    return w;
}

std::optional<size_t> OAGrid::index_of(double w1, double w2, double tol) const {
    for (size_t i = 0; i < candidates.size(); ++i)
        if (std::abs(candidates[i].w1 - w1) <= tol && std::abs(candidates[i].w2 - w2) <= tol)
            return i;
    return std::nullopt;
}

OAGrid build_grid(double k, double w2_step) {
    if (!(k > 0.0) || k > 1.0 || !(w2_step > 0.0) || w2_step > 1.0)
        throw Error("InvalidStep", "grid steps must lie in (0, 1]");
    OAGrid grid;
    grid.k = k;
    grid.w2_step = w2_step;
    const int n1 = static_cast<int>(std::floor(1.0 / k + 1e-9));
    for (int i = 0; i <= n1; ++i) {
        double w1 = i * k;
        for (int j = 0;; ++j) {
            double w2 = j * w2_step;
            if (w2 >= 1.0 - 1e-12)
                break;
            if (w1 + w2 > 1.0 + 1e-12)
                break;
            grid.candidates.push_back(MixWeights::of(w1, w2));
        }
    }
    return grid;
}

namespace {

void check_mono_aligned(const WaveBuffer& a, const WaveBuffer& b, const char* what) {
    if (a.num_channels() != 1 || b.num_channels() != 1)
        throw Error("LengthMismatch", std::string(what) + ": signals must be mono");
    if (a.num_samples() != b.num_samples())
        throw Error("LengthMismatch", std::string(what) + ": signals must have equal length");
    if (a.sample_rate != b.sample_rate)
        throw Error("RateMismatch", std::string(what) + ": signals must share one sample rate");
}

} // namespace

WaveBuffer mix(const WaveBuffer& xsum, const WaveBuffer& y_sep, const WaveBuffer& xgss,
               const MixWeights& w, size_t* clipped) {
    check_mono_aligned(xsum, y_sep, "mix");
    check_mono_aligned(xsum, xgss, "mix");

    const auto& a = xsum.channels[0];
    const auto& b = y_sep.channels[0];
    const auto& c = xgss.channels[0];
    WaveBuffer out;
    out.sample_rate = xsum.sample_rate;
    out.channels.assign(1, std::vector<float>(a.size()));
    size_t clip_count = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        auto v = static_cast<float>(w.w1 * a[i] + w.w2 * b[i] + w.w3 * c[i]);
        if (v > 1.0f) {
            v = 1.0f;
            ++clip_count;
        } else if (v < -1.0f) {
            v = -1.0f;
            ++clip_count;
        }
        out.channels[0][i] = v;
    }
    if (clipped)
        *clipped = clip_count;
    return out;
}

WaveBuffer mix_enhanced(const WaveBuffer& original, const WaveBuffer& enhanced, double w_enh) {
    if (w_enh < 0.0 || w_enh > 1.0)
        throw Error("InvalidWeights", "w_enh must lie in [0, 1]");
    if (original.num_channels() != enhanced.num_channels())
        throw Error("LengthMismatch", "mix_enhanced: channel counts differ");
    if (original.num_samples() != enhanced.num_samples())
        throw Error("LengthMismatch", "mix_enhanced: signals must have equal length");
    if (original.sample_rate != enhanced.sample_rate)
        throw Error("RateMismatch", "mix_enhanced: signals must share one sample rate");

    WaveBuffer out;
    out.sample_rate = original.sample_rate;
    out.channels.resize(original.num_channels());
    for (size_t ch = 0; ch < original.num_channels(); ++ch) {
        out.channels[ch].resize(original.num_samples());
        for (size_t i = 0; i < original.num_samples(); ++i)
            out.channels[ch][i] = static_cast<float>(w_enh * enhanced.channels[ch][i] +
                                                     (1.0 - w_enh) * original.channels[ch][i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ASR oracle and CER cache
// ---------------------------------------------------------------------------

CommandOracle::CommandOracle(std::string command_template) : template_(std::move(command_template)) {
    if (template_.find("{wav}") == std::string::npos)
        throw Error("InvalidConfig", "asr command template must contain {wav}");
}

std::string CommandOracle::transcribe(const std::string& wav_path) {
    std::string quoted = "'";
    for (char ch : wav_path) {
        if (ch == '\'')
            quoted += "'\\''";
        else
            quoted += ch;
    }
    quoted += "'";

    std::string cmd = template_;
    size_t pos;
    while ((pos = cmd.find("{wav}")) != std::string::npos)
        cmd.replace(pos, 5, quoted);

    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        throw Error("OracleFailure", "failed to launch: " + cmd);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0)
        out.append(buf, n);
    int status = pclose(pipe);
    if (status != 0)
        throw Error("OracleFailure",
                    "command exited with status " + std::to_string(status) + ": " + cmd);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r'))
        out.pop_back();
    return out;
}

namespace {

std::string cache_key(const std::string& utt_id, double w1, double w2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "|%.6f|%.6f", w1, w2);
    return utt_id + buf;
}

} // namespace

CerCache::CerCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in)
        return; // cache starts empty; the file appears on first store
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            continue; // ignore torn trailing writes
        }
        if (!j.contains("utt_id") || !j.contains("w1") || !j.contains("w2") || !j.contains("cer"))
            continue;
        entries_[cache_key(j["utt_id"].get<std::string>(), j["w1"].get<double>(),
                           j["w2"].get<double>())] = j["cer"].get<double>();
    }
}

std::optional<double> CerCache::lookup(const std::string& utt_id, double w1, double w2) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(cache_key(utt_id, w1, w2));
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

void CerCache::store(const std::string& utt_id, double w1, double w2, double cer,
                     const std::string& hyp) {
    nlohmann::ordered_json j;
    j["utt_id"] = utt_id;
    j["w1"] = w1;
    j["w2"] = w2;
    j["cer"] = cer;
    j["hyp"] = hyp;
    std::lock_guard<std::mutex> lock(mu_);
    entries_[cache_key(utt_id, w1, w2)] = cer;
    std::ofstream out(path_, std::ios::app);
    if (!out)
        throw Error("IoError", "cannot append to CER cache: " + path_);
    out << j.dump() << '\n';
}

CerVector cer_vector(const OaUtterance& utt, const OAGrid& grid, AsrOracle& oracle,
                     CerCache* cache, int workers, const std::string& scratch_dir) {
    const size_t n = grid.candidates.size();
    CerVector out;
    out.cers.assign(n, 0.0);
    out.valid.assign(n, 0);

    std::vector<size_t> pending;
    for (size_t i = 0; i < n; ++i) {
        const auto& w = grid.candidates[i];
        if (cache) {
            if (auto hit = cache->lookup(utt.utt_id, w.w1, w.w2)) {
                out.cers[i] = *hit;
                out.valid[i] = 1;
                continue;
            }
        }
        pending.push_back(i);
    }

    fs::path scratch = scratch_dir.empty() ? fs::temp_directory_path() : fs::path(scratch_dir);
    fs::create_directories(scratch);

    std::mutex out_mu;
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            size_t idx = cursor.fetch_add(1);
            if (idx >= pending.size())
                return;
            size_t cell = pending[idx];
            const MixWeights& w = grid.candidates[cell];
            char name[160];
            std::snprintf(name, sizeof(name), "%s-%03zu.wav", utt.utt_id.c_str(), cell);
            fs::path wav_path = scratch / name;
            try {
                WaveBuffer mixed = mix(utt.xsum, utt.y_sep, utt.xgss, w);
                write_wav(mixed, wav_path.string());
                std::string hyp = oracle.transcribe(wav_path.string());
                double c = cer(utt.ref_text, hyp).cer;
                if (cache)
                    cache->store(utt.utt_id, w.w1, w.w2, c, hyp);
                std::lock_guard<std::mutex> lock(out_mu);
                out.cers[cell] = c;
                out.valid[cell] = 1;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(out_mu);
                char msg[64];
                std::snprintf(msg, sizeof(msg), "cell %zu (w1=%.2f, w2=%.2f): ", cell, w.w1, w.w2);
                out.failures.push_back(msg + std::string(e.what()));
            }
            std::error_code ec;
            fs::remove(wav_path, ec);
        }
    };

    int pool = std::max(1, std::min<int>(workers, static_cast<int>(pending.size())));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int i = 0; i < pool; ++i)
            threads.emplace_back(worker);
        for (auto& th : threads)
            th.join();
    }
    return out;
}

bool CerVector::complete() const {
    return std::all_of(valid.begin(), valid.end(), [](uint8_t v) { return v != 0; });
}

// ---------------------------------------------------------------------------
// Eq. 3 loss
// ---------------------------------------------------------------------------

namespace {

double sigmoid(double x) {
    return 1.0 / (1.0 + std::exp(-x));
}

} // namespace

std::vector<double> oa_target(const std::vector<double>& cers, TargetTransform transform) {
    std::vector<double> target(cers.size());
    if (transform == TargetTransform::Verbatim) {
        for (size_t i = 0; i < cers.size(); ++i)
            target[i] = sigmoid(cers[i]);
        return target;
    }
    double mean = 0.0;
    for (double c : cers)
        mean += c;
    mean /= static_cast<double>(cers.size());
    double var = 0.0;
    for (double c : cers)
        var += (c - mean) * (c - mean);
    double sd = std::sqrt(var / static_cast<double>(cers.size()));
    for (size_t i = 0; i < cers.size(); ++i) {
        double z = sd > 0.0 ? (cers[i] - mean) / sd : 0.0;
        target[i] = sigmoid(-z);
    }
    return target;
}

namespace {

struct LossParts {
    std::vector<double> target;
    double cos = 0.0;
    double norm_u = 0.0;
    double norm_t = 0.0;
};

LossParts loss_parts(const std::vector<double>& logits, const std::vector<double>& cers,
                     double tau, TargetTransform transform) {
    if (logits.size() != cers.size())
        throw Error("LengthMismatch", "logits and cers must have equal length");
    if (logits.size() < 2)
        throw Error("LengthMismatch", "loss needs vectors of length >= 2");
    if (!(tau > 0.0))
        throw Error("InvalidConfig", "tau must be positive");

    LossParts parts;
    parts.target = oa_target(cers, transform);
    double uu = 0.0, tt = 0.0, ut = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        uu += logits[i] * logits[i];
        tt += parts.target[i] * parts.target[i];
        ut += logits[i] * parts.target[i];
    }
    if (uu == 0.0)
        throw Error("ZeroVector", "logits must not be all zero");
    parts.norm_u = std::sqrt(uu);
    parts.norm_t = std::sqrt(tt); // target entries are sigmoids, never all zero
    parts.cos = ut / (parts.norm_u * parts.norm_t);
    return parts;
}

} // namespace

double oa_loss(const std::vector<double>& logits, const std::vector<double>& cers, double tau,
               TargetTransform transform) {
    LossParts parts = loss_parts(logits, cers, tau, transform);
    // -log(sigmoid(c/tau)) = log(1 + exp(-c/tau)), computed stably
    double z = parts.cos / tau;
    return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

std::vector<double> oa_loss_grad(const std::vector<double>& logits,
                                 const std::vector<double>& cers, double tau,
                                 TargetTransform transform) {
    LossParts parts = loss_parts(logits, cers, tau, transform);
    double dl_dc = (sigmoid(parts.cos / tau) - 1.0) / tau;
    std::vector<double> grad(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
        double dc_du = parts.target[i] / (parts.norm_u * parts.norm_t) -
                       parts.cos * logits[i] / (parts.norm_u * parts.norm_u);
        grad[i] = dl_dc * dc_du;
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Bridging features and model
// ---------------------------------------------------------------------------

std::vector<double> bridging_features(const WaveBuffer& xsum, const WaveBuffer& y_sep,
                                      const WaveBuffer& xgss, const FbankConfig& cfg) {
    check_mono_aligned(xsum, y_sep, "bridging_features");
    check_mono_aligned(xsum, xgss, "bridging_features");
    std::vector<double> out;
    out.reserve(6 * static_cast<size_t>(cfg.num_mels));
    for (const WaveBuffer* sig : {&xsum, &y_sep, &xgss}) {
        auto pooled = mean_std_pool(fbank(sig->channels[0], sig->sample_rate, cfg));
        out.insert(out.end(), pooled.begin(), pooled.end());
    }
    return out;
}

std::vector<double> BridgingModel::scores(const std::vector<double>& raw_features) const {
    if (raw_features.size() != feat_mean.size())
        throw Error("LengthMismatch", "feature dimension does not match the model");
    std::vector<double> f(raw_features.size());
    for (size_t i = 0; i < f.size(); ++i)
        f[i] = (raw_features[i] - feat_mean[i]) / feat_std[i];
    std::vector<double> s(weight.size());
    for (size_t c = 0; c < weight.size(); ++c) {
        double acc = bias[c];
        for (size_t i = 0; i < f.size(); ++i)
            acc += weight[c][i] * f[i];
        s[c] = acc;
    }
    return s;
}

namespace {

// deterministic Fisher-Yates, independent of std library distribution details
void shuffle_indices(std::vector<size_t>& idx, uint64_t& state) {
    auto next = [&state]() {
        // xorshift64*
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1DULL;
    };
    for (size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[next() % i]);
}

} // namespace

BridgingModel train_bridging(const std::vector<TrainItem>& dataset, const OAGrid& grid,
                             const BridgingTrainConfig& cfg) {
    if (dataset.empty())
        throw Error("EmptyInput", "training dataset is empty");
    const size_t n_cand = grid.candidates.size();
    const size_t dim = dataset[0].features.size();
    for (const auto& item : dataset) {
        if (item.features.size() != dim)
            throw Error("LengthMismatch", "inconsistent feature dimensions in dataset");
        if (item.cers.cers.size() != n_cand)
            throw Error("LengthMismatch", "CER vector length does not match the grid");
        if (!item.cers.complete())
            throw Error("PartialCerVector", "training requires complete CER vectors");
    }

    BridgingModel model;
    model.grid = grid;
    model.tau = cfg.tau;
    model.target = cfg.target;

    // feature z-normalization fitted on the training set
    model.feat_mean.assign(dim, 0.0);
    model.feat_std.assign(dim, 0.0);
    for (const auto& item : dataset)
        for (size_t i = 0; i < dim; ++i)
            model.feat_mean[i] += item.features[i];
    for (double& m : model.feat_mean)
        m /= static_cast<double>(dataset.size());
    for (const auto& item : dataset)
        for (size_t i = 0; i < dim; ++i) {
            double dlt = item.features[i] - model.feat_mean[i];
            model.feat_std[i] += dlt * dlt;
        }
    for (double& s : model.feat_std) {
        s = std::sqrt(s / static_cast<double>(dataset.size()));
        if (s < 1e-12)
            s = 1.0; // constant feature, pass through
    }

    std::vector<std::vector<double>> feats(dataset.size());
    std::vector<std::vector<double>> targets(dataset.size());
    for (size_t d = 0; d < dataset.size(); ++d) {
        feats[d].resize(dim);
        for (size_t i = 0; i < dim; ++i)
            feats[d][i] = (dataset[d].features[i] - model.feat_mean[i]) / model.feat_std[i];
        targets[d] = oa_target(dataset[d].cers.cers, cfg.target);
    }

    // small deterministic init so the cosine is defined from the first step
    uint64_t rng = cfg.seed * 0x9E3779B97F4A7C15ULL + 0x5851F42D4C957F2DULL;
    auto next_unit = [&rng]() {
        rng ^= rng >> 12;
        rng ^= rng << 25;
        rng ^= rng >> 27;
        return static_cast<double>((rng * 0x2545F4914F6CDD1DULL) >> 11) /
               static_cast<double>(1ULL << 53);
    };
    model.weight.assign(n_cand, std::vector<double>(dim));
    model.bias.assign(n_cand, 0.0);
    for (auto& row : model.weight)
        for (double& w : row)
            w = 0.02 * (next_unit() - 0.5);
    for (double& b : model.bias)
        b = 0.02 * (next_unit() - 0.5);

    std::vector<size_t> order(dataset.size());
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    uint64_t shuffle_state = cfg.seed ^ 0xD1B54A32D192ED03ULL;
    if (shuffle_state == 0)
        shuffle_state = 0x9E3779B97F4A7C15ULL;
    std::vector<double> logits(n_cand);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_indices(order, shuffle_state);
        double epoch_loss = 0.0;
        for (size_t pos = 0; pos < order.size(); ++pos) {
            const auto& f = feats[order[pos]];
            const auto& cers = dataset[order[pos]].cers.cers;
            for (size_t c = 0; c < n_cand; ++c) {
                double acc = model.bias[c];
                for (size_t i = 0; i < dim; ++i)
                    acc += model.weight[c][i] * f[i];
                logits[c] = acc;
            }
            epoch_loss += oa_loss(logits, cers, cfg.tau, cfg.target);
            std::vector<double> g = oa_loss_grad(logits, cers, cfg.tau, cfg.target);
            for (size_t c = 0; c < n_cand; ++c) {
                double gc = g[c];
                if (gc == 0.0)
                    continue;
                double step = cfg.lr * gc;
                for (size_t i = 0; i < dim; ++i)
                    model.weight[c][i] -= step * f[i];
                model.bias[c] -= step;
            }
        }
        model.loss_trace.push_back(epoch_loss / static_cast<double>(dataset.size()));
    }
    return model;
}

OaPrediction predict_oa(const BridgingModel& model, const WaveBuffer& xsum,
                        const WaveBuffer& y_sep, const WaveBuffer& xgss,
                        const OAGrid* expected_grid) {
    if (model.weight.size() != model.grid.candidates.size() || model.weight.empty())
        throw Error("GridMismatch", "model head does not match its grid");
    if (expected_grid && (expected_grid->candidates.size() != model.grid.candidates.size() ||
                          expected_grid->k != model.grid.k ||
                          expected_grid->w2_step != model.grid.w2_step))
        throw Error("GridMismatch", "model was trained for a different grid");

    OaPrediction pred;
    pred.scores = model.scores(bridging_features(xsum, y_sep, xgss, model.feature));
    pred.index = 0;
    for (size_t i = 1; i < pred.scores.size(); ++i)
        if (pred.scores[i] > pred.scores[pred.index])
            pred.index = i; // first max wins: candidates are in (w1, w2) order
    pred.chosen = model.grid.candidates[pred.index];
    return pred;
}

// ---------------------------------------------------------------------------
// Model serialization
// ---------------------------------------------------------------------------

std::string BridgingModel::to_json() const {
    nlohmann::ordered_json j;
    j["grid"] = {{"k", grid.k}, {"w2_step", grid.w2_step}};
    j["feature"] = {{"num_mels", feature.num_mels},
                    {"window_sec", feature.window_sec},
                    {"hop_sec", feature.hop_sec},
                    {"floor", feature.floor}};
    j["tau"] = tau;
    j["target"] = target == TargetTransform::Negated ? "negated" : "verbatim";
    j["feat_mean"] = feat_mean;
    j["feat_std"] = feat_std;
    j["weight"] = weight;
    j["bias"] = bias;
    j["loss_trace"] = loss_trace;
    return j.dump(2);
}

BridgingModel BridgingModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidModel", std::string("bad model JSON: ") + e.what());
    }
    BridgingModel m;
    try {
        m.grid = build_grid(j.at("grid").at("k").get<double>(),
                            j.at("grid").at("w2_step").get<double>());
        const auto& f = j.at("feature");
        m.feature.num_mels = f.at("num_mels").get<int>();
        m.feature.window_sec = f.at("window_sec").get<double>();
        m.feature.hop_sec = f.at("hop_sec").get<double>();
        m.feature.floor = f.at("floor").get<double>();
        m.tau = j.at("tau").get<double>();
        m.target = j.at("target").get<std::string>() == "verbatim" ? TargetTransform::Verbatim
                                                                   : TargetTransform::Negated;
        m.feat_mean = j.at("feat_mean").get<std::vector<double>>();
        m.feat_std = j.at("feat_std").get<std::vector<double>>();
        m.weight = j.at("weight").get<std::vector<std::vector<double>>>();
        m.bias = j.at("bias").get<std::vector<double>>();
        if (j.contains("loss_trace"))
            m.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidModel", std::string("incomplete model JSON: ") + e.what());
    }
    if (m.weight.size() != m.grid.candidates.size() || m.bias.size() != m.grid.candidates.size())
        throw Error("GridMismatch", "model head does not match its grid");
    for (const auto& row : m.weight)
        if (row.size() != m.feat_mean.size())
            throw Error("InvalidModel", "weight row dimension does not match features");
    return m;
}

void BridgingModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("IoError", "cannot write model file: " + path);
    out << to_json() << '\n';
}

BridgingModel BridgingModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileNotFound", "cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace meetkit
