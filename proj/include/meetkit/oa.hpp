#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "meetkit/fbank.hpp"
#include "meetkit/wave.hpp"

namespace meetkit {

// Convex mixing coefficients for (Xsum, separated, GSS) signals; w3 is defined
// as 1 - w1 - w2 so the constraint holds exactly.
struct MixWeights {
    double w1 = 0.0;
    double w2 = 0.0;
    double w3 = 1.0;

    static MixWeights of(double w1, double w2); // validates ranges

    friend bool operator==(const MixWeights& a, const MixWeights& b) {
        return a.w1 == b.w1 && a.w2 == b.w2;
    }
};

// The (w1, w2) candidate lattice searched during CER grid search: w1 walks in
// steps of k, w2 in steps of w2_step staying below 1, pairs with w1 + w2 > 1
// excluded, ordered lexicographically.
struct OAGrid {
    double k = 0.05;
    double w2_step = 0.1;
    std::vector<MixWeights> candidates;

    std::optional<size_t> index_of(double w1, double w2, double tol = 1e-9) const;
};

OAGrid build_grid(double k = 0.05, double w2_step = 0.1);

// y[n] = w1*xsum[n] + w2*y_sep[n] + w3*xgss[n], clipped to [-1, 1];
// *clipped (optional) receives the number of clipped samples.
WaveBuffer mix(const WaveBuffer& xsum, const WaveBuffer& y_sep, const WaveBuffer& xgss,
               const MixWeights& w, size_t* clipped = nullptr);

// w_enh*enhanced + (1 - w_enh)*original, the front-end scale-and-mix step.
WaveBuffer mix_enhanced(const WaveBuffer& original, const WaveBuffer& enhanced, double w_enh);

// Per-candidate CERs aligned with OAGrid.candidates; cells that failed carry
// valid = false and the vector reports itself partial.
struct CerVector {
    std::vector<double> cers;
    std::vector<uint8_t> valid;
    std::vector<std::string> failures; // one message per failed cell

    bool complete() const;
};

// External speech recognizer abstraction: consumes a WAV path, returns the
// hypothesis text. Implementations throw Error("OracleFailure") on failure.
class AsrOracle {
public:
    virtual ~AsrOracle() = default;
    virtual std::string transcribe(const std::string& wav_path) = 0;
};

// Shell-command oracle: the template's "{wav}" placeholder is replaced with
// the (quoted) WAV path; stdout is the hypothesis; nonzero exit fails.
class CommandOracle : public AsrOracle {
public:
    explicit CommandOracle(std::string command_template);
    std::string transcribe(const std::string& wav_path) override;

private:
    std::string template_;
};

// JSONL-backed CER cache, one {utt_id, w1, w2, cer, hyp} object per line.
// Lookups key on (utt_id, w1, w2) with weights rounded to 6 decimals; writes
// are appended under a lock so concurrent grid cells stay consistent.
class CerCache {
public:
    explicit CerCache(std::string path);

    std::optional<double> lookup(const std::string& utt_id, double w1, double w2) const;
    void store(const std::string& utt_id, double w1, double w2, double cer,
               const std::string& hyp);

private:
    std::string path_;
    mutable std::mutex mu_;
    std::map<std::string, double> entries_;
};

struct OaUtterance {
    std::string utt_id;
    WaveBuffer xsum;
    WaveBuffer y_sep;
    WaveBuffer xgss;
    std::string ref_text;
};

// Grid search: for every candidate, mix -> transcribe -> CER against the
// reference. Completed cells are served from the cache; fresh cells run on a
// bounded worker pool and are persisted as they finish.
CerVector cer_vector(const OaUtterance& utt, const OAGrid& grid, AsrOracle& oracle,
                     CerCache* cache = nullptr, int workers = 4,
                     const std::string& scratch_dir = "");

enum class TargetTransform {
    Verbatim, // target = sigmoid(cers), the formula as printed
    Negated,  // target = sigmoid(-znorm(cers)), so high score tracks low CER
};

std::vector<double> oa_target(const std::vector<double>& cers, TargetTransform transform);

// L = -log sigmoid( cos(logits, target) / tau ).
double oa_loss(const std::vector<double>& logits, const std::vector<double>& cers, double tau,
               TargetTransform transform = TargetTransform::Negated);

// Exact gradient of oa_loss with respect to the logits.
std::vector<double> oa_loss_grad(const std::vector<double>& logits,
                                 const std::vector<double>& cers, double tau,
                                 TargetTransform transform = TargetTransform::Negated);

// Sentence-level features: 40-dim log-mel Fbank per signal, mean+std pooled
// to 80 dims, three signals concatenated into 240 dims.
std::vector<double> bridging_features(const WaveBuffer& xsum, const WaveBuffer& y_sep,
                                      const WaveBuffer& xgss, const FbankConfig& cfg = {});

struct BridgingTrainConfig {
    double lr = 0.001;
    int epochs = 30;
    double tau = 1.0;
    TargetTransform target = TargetTransform::Negated;
    uint64_t seed = 0;
};

// Affine head over normalized bridging features scoring every grid candidate.
struct BridgingModel {
    OAGrid grid;
    FbankConfig feature;
    double tau = 1.0;
    TargetTransform target = TargetTransform::Negated;
    std::vector<double> feat_mean; // feature z-normalization, estimated on train set
    std::vector<double> feat_std;
    std::vector<std::vector<double>> weight; // |candidates| x feature_dim
    std::vector<double> bias;
    std::vector<double> loss_trace; // mean training loss per epoch

    std::vector<double> scores(const std::vector<double>& raw_features) const;

    std::string to_json() const;
    static BridgingModel from_json(const std::string& text);
    void save(const std::string& path) const;
    static BridgingModel load(const std::string& path);
};

struct TrainItem {
    std::vector<double> features;
    CerVector cers;
};

// Per-item gradient descent on the mean OA loss, deterministic for a fixed
// seed (own Fisher-Yates shuffle, fixed iteration order).
BridgingModel train_bridging(const std::vector<TrainItem>& dataset, const OAGrid& grid,
                             const BridgingTrainConfig& cfg = {});

struct OaPrediction {
    std::vector<double> scores;
    size_t index = 0;
    MixWeights chosen;
};

// Scores every candidate and picks the argmax (ties: lexicographically
// smallest (w1, w2)). expected_grid, when given, must match the model's grid.
OaPrediction predict_oa(const BridgingModel& model, const WaveBuffer& xsum,
                        const WaveBuffer& y_sep, const WaveBuffer& xgss,
                        const OAGrid* expected_grid = nullptr);

} // namespace meetkit
