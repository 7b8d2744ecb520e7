#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meetkit/annotation.hpp"

namespace meetkit {

// Externally produced speaker embeddings for one recording: one D-dim vector
// per subsegment, spans sorted and non-overlapping.
struct EmbeddingSequence {
    std::string recording_id;
    Eigen::MatrixXd vectors;                         // T x D
    std::vector<std::pair<double, double>> timestamps; // (start, end) seconds
};

// Two-covariance PLDA backend.
struct PldaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd within_cov;
    Eigen::MatrixXd between_cov;
};

struct VbxConfig {
    double fa = 0.15;     // acoustic scaling
    double fb = 5.5;      // speaker-prior scaling
    double loop_p = 0.99; // HMM self-loop probability
    int max_iters = 40;
    double epsilon = 1e-4;   // stop when ELBO gain falls below this
    double prune_mass = 1.0; // drop speakers with less total posterior mass
};

struct ClusterResult {
    std::vector<int> labels;    // T assignments, argmax of posteriors
    Eigen::MatrixXd posteriors; // T x S, row-stochastic
    std::vector<double> elbo_trace;
};

double cosine_score(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& vectors);

// Average-linkage agglomerative clustering on a symmetric similarity matrix.
// Merging stops when the best pair's linkage falls below the threshold; ties
// break on the smallest (i, j) pair of cluster anchors (smallest original
// member index). Labels are compact, 0..K-1 in order of first occurrence.
std::vector<int> ahc(const Eigen::MatrixXd& similarity, double threshold);

// Two-covariance PLDA estimator: global mean, weighted between-class
// covariance of class means, pooled within-class covariance regularized by
// +1e-6*trace/D on the diagonal. Requires >= 2 classes with >= 2 samples each.
PldaModel plda_fit(const Eigen::MatrixXd& vectors, const std::vector<int>& labels);

// Pairwise same/different-speaker log-likelihood ratios under the PLDA model.
Eigen::MatrixXd plda_llr_matrix(const PldaModel& plda, const Eigen::MatrixXd& vectors);

// VB-HMM resegmentation over the embedding sequence. Emissions come from the
// PLDA model diagonalized to within-cov identity / between-cov diagonal,
// scaled by fa; speaker priors scaled by fb; self-loop probability loop_p with
// cross-speaker transitions proportional to learned speaker priors.
ClusterResult vbx(const EmbeddingSequence& seq, const std::vector<int>& init_labels,
                  const PldaModel& plda, const VbxConfig& cfg = {});

// Binary embedding file: magic "MKEB", u32 D, u32 T, u8 whitening flag,
// optional D f32 mean + D*D f32 covariance, then T*D f32 row-major vectors,
// all little-endian; timestamps live in a JSON sidecar.
struct EmbeddingFile {
    Eigen::MatrixXd vectors; // T x D
    bool has_whitening = false;
    Eigen::VectorXd whitening_mean;
    Eigen::MatrixXd whitening_cov;
};

EmbeddingFile read_embeddings(const std::string& path);
void write_embeddings(const EmbeddingFile& emb, const std::string& path);

// JSON sidecar {"recording_id": ..., "timestamps": [[start, end], ...]}.
EmbeddingSequence read_embedding_sequence(const std::string& bin_path,
                                          const std::string& sidecar_path);
void write_embedding_sidecar(const EmbeddingSequence& seq, const std::string& sidecar_path);

// (x - mean) -> whiten by cov^{-1/2} -> length-normalize, the preprocessing
// applied before AHC/VBx when the embedding file carries whitening stats.
Eigen::MatrixXd whiten_and_length_norm(const Eigen::MatrixXd& vectors,
                                       const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov);

Eigen::MatrixXd length_norm(const Eigen::MatrixXd& vectors);

// Merges per-subsegment labels back into a speaker timeline; adjacent spans
// with the same label are joined when they touch.
Annotation labels_to_annotation(const EmbeddingSequence& seq, const std::vector<int>& labels,
                                const std::string& prefix = "spk");

} // namespace meetkit
