#include "meetkit/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "meetkit/error.hpp"

namespace meetkit {

double cosine_score(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw Error("LengthMismatch", "cosine inputs must have equal dimension");
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        throw Error("ZeroVector", "cosine similarity is undefined for a zero vector");
    return a.dot(b) / (na * nb);
}

Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& vectors) {
    const Eigen::Index t = vectors.rows();
    Eigen::MatrixXd sim(t, t);
    for (Eigen::Index i = 0; i < t; ++i) {
        sim(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < t; ++j) {
            double s = cosine_score(vectors.row(i), vectors.row(j));
            sim(i, j) = s;
            sim(j, i) = s;
        }
    }
    return sim;
}

// ---------------------------------------------------------------------------
// AHC
// ---------------------------------------------------------------------------

std::vector<int> ahc(const Eigen::MatrixXd& similarity, double threshold) {
    if (similarity.rows() != similarity.cols())
        throw Error("NonSquareMatrix", "similarity matrix must be square");
    const int t = static_cast<int>(similarity.rows());
    if (t == 0)
        return {};

    // one active cluster per item; linkage updated per Lance-Williams for
    // average linkage: sim(A+B, C) = (|A| s(A,C) + |B| s(B,C)) / (|A|+|B|)
    std::vector<int> anchor(t);      // smallest original member index
    std::vector<int> size(t, 1);
    std::vector<char> alive(t, 1);
    std::iota(anchor.begin(), anchor.end(), 0);
    Eigen::MatrixXd link = similarity;

    std::vector<std::vector<int>> members(t);
    for (int i = 0; i < t; ++i)
        members[i] = {i};

    int active = t;
    while (active > 1) {
        int bi = -1, bj = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < t; ++i) {
            if (!alive[i])
                continue;
            for (int j = i + 1; j < t; ++j) {
                if (!alive[j])
                    continue;
                double s = link(i, j);
                int ai = std::min(anchor[i], anchor[j]);
                int aj = std::max(anchor[i], anchor[j]);
                bool wins = false;
                if (s > best) {
                    wins = true;
                } else if (s == best && bi >= 0) {
                    int ci = std::min(anchor[bi], anchor[bj]);
                    int cj = std::max(anchor[bi], anchor[bj]);
                    wins = (ai < ci) || (ai == ci && aj < cj);
                }
                if (wins) {
                    best = s;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < threshold)
            break;

        // merge bj into bi
        for (int c = 0; c < t; ++c) {
            if (!alive[c] || c == bi || c == bj)
                continue;
            double merged = (size[bi] * link(bi, c) + size[bj] * link(bj, c)) /
                            static_cast<double>(size[bi] + size[bj]);
            link(bi, c) = merged;
            link(c, bi) = merged;
        }
        size[bi] += size[bj];
        anchor[bi] = std::min(anchor[bi], anchor[bj]);
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        alive[bj] = 0;
        --active;
    }

    std::vector<int> labels(t, -1);
    int next = 0;
    for (int i = 0; i < t; ++i) {
        if (labels[i] >= 0)
            continue;
        // find the cluster containing i
        for (int c = 0; c < t; ++c) {
            if (!alive[c])
                continue;
            if (std::find(members[c].begin(), members[c].end(), i) != members[c].end()) {
                for (int m : members[c])
                    labels[m] = next;
                ++next;
                break;
            }
        }
    }
    return labels;
}

// ---------------------------------------------------------------------------
// PLDA
// ---------------------------------------------------------------------------

PldaModel plda_fit(const Eigen::MatrixXd& vectors, const std::vector<int>& labels) {
    const Eigen::Index n = vectors.rows();
    const Eigen::Index d = vectors.cols();
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw Error("LengthMismatch", "labels size must match vector count");

    std::map<int, std::vector<Eigen::Index>> classes;
    for (Eigen::Index i = 0; i < n; ++i)
        classes[labels[i]].push_back(i);
    if (classes.size() < 2)
        throw Error("DegenerateClasses", "PLDA needs at least 2 classes");
    for (const auto& [cls, idx] : classes)
        if (idx.size() < 2)
            throw Error("DegenerateClasses",
                        "class " + std::to_string(cls) + " has fewer than 2 samples");

    PldaModel model;
    model.mean = vectors.colwise().mean();

    model.between_cov = Eigen::MatrixXd::Zero(d, d);
    model.within_cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [cls, idx] : classes) {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
        for (Eigen::Index i : idx)
            mu += vectors.row(i).transpose();
        mu /= static_cast<double>(idx.size());

        Eigen::VectorXd centered_mean = mu - model.mean;
        model.between_cov +=
            static_cast<double>(idx.size()) * centered_mean * centered_mean.transpose();
        for (Eigen::Index i : idx) {
            Eigen::VectorXd r = vectors.row(i).transpose() - mu;
            model.within_cov += r * r.transpose();
        }
    }
    model.between_cov /= static_cast<double>(n);
    model.within_cov /= static_cast<double>(n);

    double trace = model.within_cov.trace();
    if (trace <= 0.0)
        throw Error("DegenerateClasses", "within-class covariance has zero trace");
    model.within_cov += (1e-6 * trace / static_cast<double>(d)) *
                        Eigen::MatrixXd::Identity(d, d);
    return model;
}

namespace {

// Simultaneous diagonalization of the two-covariance model: returns the
// transform A and spectrum phi with A Σw Aᵀ = I and A Σb Aᵀ = diag(phi).
struct PldaSpace {
    Eigen::MatrixXd transform; // D x D
    Eigen::VectorXd phi;       // D, >= 0
    Eigen::VectorXd mean;
};

PldaSpace diagonalize(const PldaModel& plda) {
    const Eigen::Index d = plda.mean.size();
    if (plda.within_cov.rows() != d || plda.within_cov.cols() != d ||
        plda.between_cov.rows() != d || plda.between_cov.cols() != d)
        throw Error("InvalidModel", "PLDA covariance dimensions do not match the mean");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_w(plda.within_cov);
    if (es_w.info() != Eigen::Success)
        throw Error("NumericalFailure", "within-covariance eigendecomposition failed");
    Eigen::VectorXd wvals = es_w.eigenvalues();
    if (wvals.minCoeff() <= 0.0)
        throw Error("InvalidModel", "within-class covariance must be positive definite");
    Eigen::MatrixXd w_inv_sqrt = es_w.eigenvectors() *
                                 wvals.cwiseSqrt().cwiseInverse().asDiagonal() *
                                 es_w.eigenvectors().transpose();

    Eigen::MatrixXd b_white = w_inv_sqrt * plda.between_cov * w_inv_sqrt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_b(0.5 * (b_white + b_white.transpose()));
    if (es_b.info() != Eigen::Success)
        throw Error("NumericalFailure", "between-covariance eigendecomposition failed");

    PldaSpace space;
    space.transform = es_b.eigenvectors().transpose() * w_inv_sqrt;
    space.phi = es_b.eigenvalues().cwiseMax(0.0);
    space.mean = plda.mean;
    return space;
}

} // namespace

Eigen::MatrixXd plda_llr_matrix(const PldaModel& plda, const Eigen::MatrixXd& vectors) {
    PldaSpace space = diagonalize(plda);
    const Eigen::Index t = vectors.rows();
    const Eigen::Index d = vectors.cols();
    if (d != space.mean.size())
        throw Error("LengthMismatch", "vector dimension does not match the PLDA model");

    Eigen::MatrixXd x = (vectors.rowwise() - space.mean.transpose()) * space.transform.transpose();

    // per-dimension closed form with s = phi + 1 (total) and c = phi (shared):
    // llr_d = ln N2([u v]; 0, [[s c][c s]]) - ln N(u; 0, s) - ln N(v; 0, s)
    Eigen::VectorXd s = space.phi.array() + 1.0;
    Eigen::VectorXd c = space.phi;
    Eigen::VectorXd det2 = (s.array().square() - c.array().square()).matrix();
    Eigen::VectorXd log_const = (s.array().log() - 0.5 * det2.array().log()).matrix();

    Eigen::MatrixXd llr(t, t);
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = i; j < t; ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                double u = x(i, k), v = x(j, k);
                double quad_joint = (s(k) * (u * u + v * v) - 2.0 * c(k) * u * v) / det2(k);
                double quad_indep = (u * u + v * v) / s(k);
                acc += log_const(k) - 0.5 * quad_joint + 0.5 * quad_indep;
            }
            llr(i, j) = acc;
            llr(j, i) = acc;
        }
    }
    return llr;
}

// ---------------------------------------------------------------------------
// VBx
// ---------------------------------------------------------------------------

namespace {

double logsumexp_row(const Eigen::VectorXd& v) {
    double m = v.maxCoeff();
    if (!std::isfinite(m))
        return m; // all -inf
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        acc += std::exp(v(i) - m);
    return m + std::log(acc);
}

} // namespace

ClusterResult vbx(const EmbeddingSequence& seq, const std::vector<int>& init_labels,
                  const PldaModel& plda, const VbxConfig& cfg) {
    const Eigen::Index t = seq.vectors.rows();
    if (t == 0 || static_cast<Eigen::Index>(init_labels.size()) != t)
        throw Error("EmptyInit", "init labels must be non-empty and match the sequence length");
    if (!(cfg.fa > 0.0) || !(cfg.fb > 0.0) || !(cfg.loop_p > 0.0) || !(cfg.loop_p < 1.0))
        throw Error("InvalidConfig", "require fa > 0, fb > 0 and loop_p in (0, 1)");

    // compact initial labels in order of first appearance
    std::map<int, int> relabel;
    std::vector<int> gamma_init(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        auto [it, inserted] = relabel.try_emplace(init_labels[i], static_cast<int>(relabel.size()));
        gamma_init[i] = it->second;
    }
    const int s_init = static_cast<int>(relabel.size());

    PldaSpace space = diagonalize(plda);
    const Eigen::Index d = seq.vectors.cols();
    if (d != space.mean.size())
        throw Error("LengthMismatch", "embedding dimension does not match the PLDA model");

    // PLDA space: within-cov identity, between-cov diag(phi)
    Eigen::MatrixXd x =
        (seq.vectors.rowwise() - space.mean.transpose()) * space.transform.transpose();
    Eigen::VectorXd phi = space.phi;
    Eigen::MatrixXd rho = x.array().rowwise() * phi.transpose().array().sqrt(); // T x D
    Eigen::VectorXd g = -0.5 * (x.array().square().rowwise().sum() +
                                static_cast<double>(d) * std::log(2.0 * M_PI));

    int s = s_init;
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(t, s);
    for (Eigen::Index i = 0; i < t; ++i)
        gamma(i, gamma_init[i]) = 1.0;
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(s, 1.0 / s);

    ClusterResult result;
    const double fa_over_fb = cfg.fa / cfg.fb;
    Eigen::MatrixXd log_fw(t, s), log_bw(t, s), log_post(t, s);

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        // q(y_s) = N(alpha_s, diag(inv_l_s)) per speaker
        Eigen::VectorXd counts = gamma.colwise().sum(); // S
        Eigen::MatrixXd inv_l(s, static_cast<int>(d));
        Eigen::MatrixXd alpha(s, static_cast<int>(d));
        for (int k = 0; k < s; ++k) {
            inv_l.row(k) = (1.0 + fa_over_fb * counts(k) * phi.array()).inverse();
            alpha.row(k) =
                fa_over_fb * inv_l.row(k).array() * (gamma.col(k).transpose() * rho).array();
        }

        // scaled expected emission log-likelihoods
        // E[ln N(x_i; V y_k, I)] = g_i + rho_i . alpha_k - 0.5 (inv_l_k + alpha_k^2) . phi
        Eigen::MatrixXd log_p(t, s);
        Eigen::VectorXd quad = (inv_l + alpha.array().square().matrix()) * phi; // S
        Eigen::MatrixXd dots = rho * alpha.transpose();                          // T x S
        for (Eigen::Index i = 0; i < t; ++i)
            for (int k = 0; k < s; ++k)
                log_p(i, k) = cfg.fa * (dots(i, k) - 0.5 * quad(k) + g(i));

        // forward-backward over the sticky HMM
        Eigen::VectorXd log_pi = pi.array().max(0.0).log();
        Eigen::MatrixXd log_tr(s, s);
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b)
                log_tr(a, b) = std::log((a == b ? cfg.loop_p : 0.0) + (1.0 - cfg.loop_p) * pi(b));

        log_fw.row(0) = log_p.row(0) + log_pi.transpose();
        for (Eigen::Index i = 1; i < t; ++i) {
            for (int b = 0; b < s; ++b) {
                Eigen::VectorXd prev = log_fw.row(i - 1).transpose() + log_tr.col(b);
                log_fw(i, b) = log_p(i, b) + logsumexp_row(prev);
            }
        }
        log_bw.row(t - 1).setZero();
        for (Eigen::Index i = t - 2; i >= 0; --i) {
            for (int a = 0; a < s; ++a) {
                Eigen::VectorXd nxt =
                    log_tr.row(a).transpose() + log_p.row(i + 1).transpose() + log_bw.row(i + 1).transpose();
                log_bw(i, a) = logsumexp_row(nxt);
            }
        }
        double log_px = logsumexp_row(log_fw.row(t - 1));
        if (!std::isfinite(log_px))
            throw Error("NumericalFailure", "non-finite HMM likelihood in VBx");

        for (Eigen::Index i = 0; i < t; ++i) {
            log_post.row(i) = log_fw.row(i) + log_bw.row(i);
            double norm = logsumexp_row(log_post.row(i));
            log_post.row(i).array() -= norm;
        }
        gamma = log_post.array().exp();

        // ELBO = HMM evidence + Fb * -KL(q(Y) || N(0, I))
        double kl_term = 0.0;
        for (int k = 0; k < s; ++k)
            kl_term += 0.5 * (inv_l.row(k).array().log() - inv_l.row(k).array() -
                              alpha.row(k).array().square() + 1.0)
                                 .sum();
        double elbo = log_px + cfg.fb * kl_term;
        if (!std::isfinite(elbo))
            throw Error("NumericalFailure", "non-finite ELBO in VBx");
        result.elbo_trace.push_back(elbo);

        // speaker prior update: initial occupancy plus expected cross-speaker
        // entries through the (1 - loop_p) branch
        Eigen::VectorXd new_pi = gamma.row(0).transpose();
        for (Eigen::Index i = 1; i < t; ++i) {
            double fw_sum = logsumexp_row(log_fw.row(i - 1));
            for (int b = 0; b < s; ++b) {
                if (pi(b) <= 0.0)
                    continue;
                double le = fw_sum + std::log(1.0 - cfg.loop_p) + std::log(pi(b)) + log_p(i, b) +
                            log_bw(i, b) - log_px;
                new_pi(b) += std::exp(le);
            }
        }
        pi = new_pi / new_pi.sum();

        if (result.elbo_trace.size() >= 2) {
            double gain = result.elbo_trace[result.elbo_trace.size() - 1] -
                          result.elbo_trace[result.elbo_trace.size() - 2];
            if (gain < cfg.epsilon)
                break;
        }
    }

    // drop speakers with less than prune_mass total posterior (keep at least one)
    Eigen::VectorXd mass = gamma.colwise().sum();
    std::vector<int> kept;
    for (int k = 0; k < s; ++k)
        if (mass(k) >= cfg.prune_mass)
            kept.push_back(k);
    if (kept.empty()) {
        int best = 0;
        mass.maxCoeff(&best);
        kept.push_back(best);
    }
    Eigen::MatrixXd post(t, static_cast<int>(kept.size()));
    for (size_t k = 0; k < kept.size(); ++k)
        post.col(static_cast<int>(k)) = gamma.col(kept[k]);
    for (Eigen::Index i = 0; i < t; ++i) {
        double row_sum = post.row(i).sum();
        if (row_sum > 0.0)
            post.row(i) /= row_sum;
        else
            post.row(i).setConstant(1.0 / static_cast<double>(kept.size()));
    }

    result.posteriors = post;
    result.labels.resize(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        int best = 0;
        post.row(i).maxCoeff(&best);
        result.labels[i] = best;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Embedding files
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'M', 'K', 'E', 'B'};

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& what) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw Error("CorruptHeader", "embedding file truncated while reading " + what);
    return v;
}

} // namespace

EmbeddingFile read_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileNotFound", "cannot open embedding file: " + path);

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw Error("CorruptHeader", "bad embedding file magic");
    auto d = read_raw<uint32_t>(in, "dimension");
    auto t = read_raw<uint32_t>(in, "count");
    auto flag = read_raw<uint8_t>(in, "whitening flag");
    if (d == 0 || t == 0)
        throw Error("CorruptHeader", "embedding file with zero dimension or count");

    EmbeddingFile emb;
    emb.has_whitening = flag != 0;
    if (emb.has_whitening) {
        emb.whitening_mean.resize(d);
        for (uint32_t i = 0; i < d; ++i)
            emb.whitening_mean(i) = read_raw<float>(in, "whitening mean");
        emb.whitening_cov.resize(d, d);
        for (uint32_t i = 0; i < d; ++i)
            for (uint32_t j = 0; j < d; ++j)
                emb.whitening_cov(i, j) = read_raw<float>(in, "whitening covariance");
    }
    emb.vectors.resize(t, d);
    for (uint32_t i = 0; i < t; ++i)
        for (uint32_t j = 0; j < d; ++j)
            emb.vectors(i, j) = read_raw<float>(in, "vector row");
    if (!emb.vectors.allFinite())
        throw Error("CorruptHeader", "embedding file contains non-finite values");
    return emb;
}

void write_embeddings(const EmbeddingFile& emb, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("IoError", "cannot write embedding file: " + path);
    out.write(kMagic, 4);
    write_raw<uint32_t>(out, static_cast<uint32_t>(emb.vectors.cols()));
    write_raw<uint32_t>(out, static_cast<uint32_t>(emb.vectors.rows()));
    write_raw<uint8_t>(out, emb.has_whitening ? 1 : 0);
    if (emb.has_whitening) {
        for (Eigen::Index i = 0; i < emb.whitening_mean.size(); ++i)
            write_raw<float>(out, static_cast<float>(emb.whitening_mean(i)));
        for (Eigen::Index i = 0; i < emb.whitening_cov.rows(); ++i)
            for (Eigen::Index j = 0; j < emb.whitening_cov.cols(); ++j)
                write_raw<float>(out, static_cast<float>(emb.whitening_cov(i, j)));
    }
    for (Eigen::Index i = 0; i < emb.vectors.rows(); ++i)
        for (Eigen::Index j = 0; j < emb.vectors.cols(); ++j)
            write_raw<float>(out, static_cast<float>(emb.vectors(i, j)));
}

EmbeddingSequence read_embedding_sequence(const std::string& bin_path,
                                          const std::string& sidecar_path) {
    EmbeddingFile emb = read_embeddings(bin_path);

    std::ifstream in(sidecar_path);
    if (!in)
        throw Error("FileNotFound", "cannot open timestamp sidecar: " + sidecar_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("MalformedLine", std::string("bad sidecar JSON: ") + e.what());
    }

    EmbeddingSequence seq;
    seq.recording_id = j.value("recording_id", std::string("recording"));
    for (const auto& span : j.at("timestamps"))
        seq.timestamps.push_back({span.at(0).get<double>(), span.at(1).get<double>()});
    if (static_cast<Eigen::Index>(seq.timestamps.size()) != emb.vectors.rows())
        throw Error("LengthMismatch", "timestamp count does not match embedding count");
    for (size_t i = 0; i < seq.timestamps.size(); ++i) {
        if (seq.timestamps[i].second <= seq.timestamps[i].first)
            throw Error("MalformedLine", "timestamp span " + std::to_string(i) + " is empty");
        if (i > 0 && seq.timestamps[i].first < seq.timestamps[i - 1].second - 1e-9)
            throw Error("MalformedLine", "timestamps must be sorted and non-overlapping");
    }

    if (emb.has_whitening)
        seq.vectors = whiten_and_length_norm(emb.vectors, emb.whitening_mean, emb.whitening_cov);
    else
        seq.vectors = emb.vectors;
    return seq;
}

void write_embedding_sidecar(const EmbeddingSequence& seq, const std::string& sidecar_path) {
    nlohmann::ordered_json j;
    j["recording_id"] = seq.recording_id;
    auto spans = nlohmann::json::array();
    for (const auto& [start, end] : seq.timestamps)
        spans.push_back({start, end});
    j["timestamps"] = spans;
    std::ofstream out(sidecar_path);
    if (!out)
        throw Error("IoError", "cannot write sidecar: " + sidecar_path);
    out << j.dump(2) << '\n';
}

Eigen::MatrixXd whiten_and_length_norm(const Eigen::MatrixXd& vectors,
                                       const Eigen::VectorXd& mean,
                                       const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw Error("InvalidModel", "whitening covariance must be positive definite");
    Eigen::MatrixXd w = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
    Eigen::MatrixXd x = (vectors.rowwise() - mean.transpose()) * w.transpose();
    return length_norm(x);
}

Eigen::MatrixXd length_norm(const Eigen::MatrixXd& vectors) {
    Eigen::MatrixXd out = vectors;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        double n = out.row(i).norm();
        if (n > 0.0)
            out.row(i) /= n;
    }
    return out;
}

Annotation labels_to_annotation(const EmbeddingSequence& seq, const std::vector<int>& labels,
                                const std::string& prefix) {
    if (labels.size() != seq.timestamps.size())
        throw Error("LengthMismatch", "labels must match timestamp count");
    Annotation ann;
    ann.recording_id = seq.recording_id;
    size_t i = 0;
    while (i < labels.size()) {
        size_t j = i + 1;
        double end = seq.timestamps[i].second;
        while (j < labels.size() && labels[j] == labels[i] &&
               seq.timestamps[j].first <= end + 1e-9) {
            end = seq.timestamps[j].second;
            ++j;
        }
        ann.segments.push_back(
            Segment{seq.timestamps[i].first, end - seq.timestamps[i].first,
                    prefix + std::to_string(labels[i])});
        i = j;
    }
    ann.sort_segments();
    return ann;
}

} // namespace meetkit
