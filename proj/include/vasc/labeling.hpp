#pragma once

#include <array>
#include <filesystem>

#include "vasc/grid.hpp"
#include "vasc/image_io.hpp"
#include "vasc/topology.hpp"

namespace vasc {

/// Per-pixel artery and vein probabilities in [0,1]. They need not sum to 1.
struct AVProbabilityMap {
    ProbabilityGrid artery;
    ProbabilityGrid vein;

    int width() const { return artery.width(); }
    int height() const { return artery.height(); }
};

/// Two single-channel 8-bit images; probability = value / 255.
AVProbabilityMap load_av_maps(const std::filesystem::path& artery, const std::filesystem::path& vein);
/// One file with at least two channels: channel 0 = artery, channel 1 = vein.
AVProbabilityMap load_av_combined(const std::filesystem::path& path);
AVProbabilityMap av_from_planes(const LikelihoodMap& artery, const LikelihoodMap& vein);

struct LabelingOptions {
    /// Segments with |mean p_artery - mean p_vein| below this may be relabeled.
    double delta = 0.1;
    /// Segments whose mean probabilities are both below this are unknown.
    double tau_av = 0.05;
    int max_rounds = 10;
};

/// Samples probabilities at every node, labels every segment by comparing its
/// mean artery and vein probability along the path.
VesselGraph label_nodes(const VesselGraph& graph, const AVProbabilityMap& av, const LabelingOptions& options = {});

struct PropagationResult {
    VesselGraph graph;
    int rounds = 0;
    bool converged = false;
};

/// Neighbour-majority relabeling of low-confidence segments. Each round visits
/// segments in id order and lets every segment with confidence < delta adopt
/// the label with the larger sum of arc * confidence over its labeled
/// neighbours (segments sharing an endpoint). Ties keep the current label.
PropagationResult propagate(const VesselGraph& graph, const LabelingOptions& options = {});

/// Node labels follow the segments through them (arc-weighted majority at
/// endpoints).
void refresh_node_labels(VesselGraph& graph);

/// Confusion counts over centerline pixels against a ground-truth A/V image
/// (red = artery, blue = vein; anything else is ignored). Rows: truth
/// artery/vein; columns: predicted artery/vein/unknown.
struct ConfusionMatrix {
    std::array<std::array<long, 3>, 2> counts{};
    double sensitivity() const;  // artery recall
    double specificity() const;  // vein recall
    double balanced_accuracy() const { return 0.5 * (sensitivity() + specificity()); }
};
ConfusionMatrix centerline_confusion(const VesselGraph& graph, const DecodedImage& truth);

}  // namespace vasc
