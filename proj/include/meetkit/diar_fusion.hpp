#pragma once

#include <optional>
#include <string>
#include <vector>

#include "meetkit/annotation.hpp"

namespace meetkit {

struct FusionInput {
    std::vector<Annotation> hypotheses;         // >= 1, all for one recording
    std::optional<std::vector<double>> weights; // positive, same length; default uniform
};

// Rank-based default weights 1/rank, normalized to sum 1 (inputs assumed in
// rank order, best first).
std::vector<double> rank_weights(size_t count);

// Relabels every hypothesis onto hypothesis 0's label space using the
// one-to-one assignment maximizing total pairwise temporal overlap with the
// anchor. Labels with no overlapping match keep a fresh label.
std::vector<Annotation> map_labels(const std::vector<Annotation>& hypotheses);

// Overlap-aware label voting: the timeline is cut at all segment boundaries;
// per region each mapped label accumulates the weight of the hypotheses
// asserting it, the speaker count is the weighted mean of per-hypothesis
// active counts rounded half up, and the top-n labels win (ties by label
// order). Per-label spans are merged back into segments.
Annotation dover_lap(const FusionInput& input);

} // namespace meetkit
