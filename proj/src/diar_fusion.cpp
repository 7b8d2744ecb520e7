#include "meetkit/diar_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "meetkit/assignment.hpp"
#include "meetkit/error.hpp"

namespace meetkit {

std::vector<double> rank_weights(size_t count) {
    std::vector<double> w(count);
    double sum = 0.0;
    for (size_t i = 0; i < count; ++i) {
        w[i] = 1.0 / static_cast<double>(i + 1);
        sum += w[i];
    }
    for (double& x : w)
        x /= sum;
    return w;
}

namespace {

// total co-occurrence duration between every (label_a, label_b) pair
std::vector<std::vector<double>> overlap_matrix(const Annotation& a, const Annotation& b,
                                                const std::vector<std::string>& labels_a,
                                                const std::vector<std::string>& labels_b) {
    std::map<std::string, size_t> ia, ib;
    for (size_t i = 0; i < labels_a.size(); ++i)
        ia[labels_a[i]] = i;
    for (size_t j = 0; j < labels_b.size(); ++j)
        ib[labels_b[j]] = j;

    std::vector<std::vector<double>> m(labels_a.size(),
                                       std::vector<double>(labels_b.size(), 0.0));
    for (const auto& sa : a.segments) {
        for (const auto& sb : b.segments) {
            double lo = std::max(sa.start, sb.start);
            double hi = std::min(sa.end(), sb.end());
            if (hi > lo)
                m[ia[sa.speaker]][ib[sb.speaker]] += hi - lo;
        }
    }
    return m;
}

void validate_input(const FusionInput& input) {
    if (input.hypotheses.empty())
        throw Error("EmptyInput", "fusion requires at least one hypothesis");
    const std::string& rec = input.hypotheses[0].recording_id;
    for (const auto& h : input.hypotheses)
        if (h.recording_id != rec)
            throw Error("RecordingMismatch", "all hypotheses must share one recording id");
    if (input.weights) {
        if (input.weights->size() != input.hypotheses.size())
            throw Error("InvalidWeights", "weights length must match hypothesis count");
        for (double w : *input.weights)
            if (!(w > 0.0))
                throw Error("InvalidWeights", "weights must be positive");
    }
}

} // namespace

std::vector<Annotation> map_labels(const std::vector<Annotation>& hypotheses) {
    if (hypotheses.size() < 2)
        throw Error("EmptyInput", "label mapping requires at least two hypotheses");

    const Annotation& anchor = hypotheses[0];
    std::vector<std::string> anchor_labels = anchor.speakers();

    std::vector<Annotation> out;
    out.push_back(anchor);

    std::set<std::string> taken(anchor_labels.begin(), anchor_labels.end());
    for (size_t h = 1; h < hypotheses.size(); ++h) {
        const Annotation& hyp = hypotheses[h];
        std::vector<std::string> labels = hyp.speakers();
        std::map<std::string, std::string> rename;

        if (!anchor_labels.empty() && !labels.empty()) {
            auto m = overlap_matrix(anchor, hyp, anchor_labels, labels);
            AssignmentResult asg = solve_assignment_max(m);
            for (size_t i = 0; i < anchor_labels.size(); ++i) {
                int j = asg.row_to_col[i];
                if (j >= 0 && m[i][j] > 0.0)
                    rename[labels[j]] = anchor_labels[i];
            }
        }
        // unmatched labels get fresh names, unique across the whole output
        for (const auto& lbl : labels) {
            if (rename.count(lbl))
                continue;
            std::string fresh = lbl;
            int suffix = static_cast<int>(h);
            while (taken.count(fresh))
                fresh = lbl + "#" + std::to_string(suffix++);
            rename[lbl] = fresh;
            taken.insert(fresh);
        }

        Annotation mapped = hyp;
        for (auto& seg : mapped.segments)
            seg.speaker = rename.at(seg.speaker);
        mapped.sort_segments();
        out.push_back(std::move(mapped));
    }
    return out;
}

Annotation dover_lap(const FusionInput& input) {
    validate_input(input);
    const size_t k = input.hypotheses.size();
    if (k == 1)
        return input.hypotheses[0];

    std::vector<double> weights =
        input.weights ? *input.weights : std::vector<double>(k, 1.0 / static_cast<double>(k));
    double total_weight = 0.0;
    for (double w : weights)
        total_weight += w;

    std::vector<Annotation> mapped = map_labels(input.hypotheses);

    std::vector<double> cuts;
    for (const auto& h : mapped) {
        for (const auto& seg : h.segments) {
            cuts.push_back(seg.start);
            cuts.push_back(seg.end());
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // winning label set per atomic region
    std::map<std::string, std::vector<std::pair<double, double>>> label_spans;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        double lo = cuts[c], hi = cuts[c + 1];
        if (hi - lo <= 0.0)
            continue;
        double mid = 0.5 * (lo + hi);

        std::map<std::string, double> label_weight;
        double count_sum = 0.0;
        for (size_t h = 0; h < k; ++h) {
            int active = 0;
            std::set<std::string> seen;
            for (const auto& seg : mapped[h].segments) {
                if (seg.start <= mid && mid < seg.end() && seen.insert(seg.speaker).second) {
                    ++active;
                    label_weight[seg.speaker] += weights[h];
                }
            }
            count_sum += weights[h] * active;
        }
        if (label_weight.empty())
            continue;

        // weighted mean speaker count, rounded half up
        int n = static_cast<int>(std::floor(count_sum / total_weight + 0.5 + 1e-12));
        if (n <= 0)
            continue;

        std::vector<std::pair<std::string, double>> ranked(label_weight.begin(),
                                                           label_weight.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second)
                return a.second > b.second;
            return a.first < b.first;
        });
        size_t take = std::min(static_cast<size_t>(n), ranked.size());
        for (size_t i = 0; i < take; ++i)
            label_spans[ranked[i].first].push_back({lo, hi});
    }

    // merge touching spans per label back into segments
    Annotation out;
    out.recording_id = input.hypotheses[0].recording_id;
    for (auto& [label, spans] : label_spans) {
        std::sort(spans.begin(), spans.end());
        size_t i = 0;
        while (i < spans.size()) {
            double lo = spans[i].first, hi = spans[i].second;
            size_t j = i + 1;
            while (j < spans.size() && spans[j].first <= hi + 1e-9) {
                hi = std::max(hi, spans[j].second);
                ++j;
            }
            out.segments.push_back(Segment{lo, hi - lo, label});
            i = j;
        }
    }
    out.sort_segments();
    return out;
}

} // namespace meetkit
