#pragma once

#include <span>
#include <string>
#include <vector>

#include "vasc/grid.hpp"

namespace vasc {

enum class NodeKind { End, Branch, Anchor };
enum class VesselLabel { Unknown, Artery, Vein };

std::string to_string(NodeKind kind);
std::string to_string(VesselLabel label);
NodeKind parse_node_kind(const std::string& s);
VesselLabel parse_label(const std::string& s);

/// Sum of consecutive-pixel Euclidean steps (1 or sqrt 2).
double arc_length(std::span<const Pixel> path);
/// Straight-line distance between the first and last pixel.
double chord_length(std::span<const Pixel> path);

// =============================================================================
// Pixel graph
// =============================================================================

/// Every foreground pixel is a node; nodes at Chebyshev distance 1 share an edge.
class PixelGraph {
public:
    PixelGraph() = default;
    static PixelGraph from_mask(const BinaryMask& mask);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<Pixel>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    bool has(Pixel p) const;
    /// Node id of a pixel, or -1.
    int id(Pixel p) const;

    /// All 8-adjacent nodes, in N, NE, E, SE, S, SW, W, NW order.
    std::vector<int> neighbours(int node) const;

    /// 8-adjacent nodes minus redundant diagonals: a diagonal neighbour is
    /// dropped when one of the two pixels 4-adjacent to both is also a node,
    /// so staircase corners do not form spurious triangles.
    std::vector<int> skeleton_neighbours(int node) const;

    /// Number of 8-adjacency edges.
    std::size_t edge_count() const;
    /// Total Euclidean length of the skeleton edges (see skeleton_neighbours).
    double skeleton_edge_length() const;

    BinaryMask mask() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Pixel> nodes_;
    std::vector<int> index_;
};

/// Union over thresholds of thin(binarize(map, t)).
BinaryMask union_mask(const LikelihoodMap& map, std::span<const int> thresholds);

/// Skeletons from neighbouring thresholds sit a pixel apart, so their union
/// is a ribbon with pinhole cycles. Fills enclosed holes whose inradius is at
/// most max_hole_radius and thins again.
BinaryMask consolidate(const BinaryMask& skeletons, double max_hole_radius = 2.0);

PixelGraph union_graph(const LikelihoodMap& map, std::span<const int> thresholds);

// =============================================================================
// Vessel graph
// =============================================================================

struct VesselNode {
    Pixel pos;
    NodeKind kind = NodeKind::End;
    double bw = 0.0;
    double p_artery = 0.0;
    double p_vein = 0.0;
    VesselLabel label = VesselLabel::Unknown;
};

struct VesselSegment {
    /// Node ids along the segment: first endpoint, anchors, last endpoint.
    std::vector<int> node_ids;
    std::vector<Pixel> path;
    double arc = 0.0;
    double chord = 0.0;
    double width = 0.0;
    VesselLabel label = VesselLabel::Unknown;
    /// Mean probabilities over the path, filled by labeling.
    double p_artery = 0.0;
    double p_vein = 0.0;
    /// Path returns to its first pixel (no branch node on the loop).
    bool closed = false;
    /// Retrace could not connect the endpoints and kept the original path.
    bool retrace_failed = false;

    int first() const { return node_ids.front(); }
    int last() const { return node_ids.back(); }
    double confidence() const;
    void update_lengths();
};

/// Node and segment ids are their indices in the vectors.
struct VesselGraph {
    int width = 0;
    int height = 0;
    std::vector<VesselNode> nodes;
    std::vector<VesselSegment> segments;

    /// Number of open segments ending at each node (a loop counts twice).
    std::vector<int> degrees() const;
    /// Open segments incident to each node.
    std::vector<std::vector<int>> incidence() const;
};

/// Collapses degree-2 chains into polyline segments. End (degree <= 1) and
/// branch (degree >= 3) nodes are kept, and touching branch pixels share one
/// node placed at the member nearest their centroid. Anchor nodes are added
/// every `spacing` pixels along each chain. Pure cycles become one closed
/// segment seeded at their first pixel in row-major order.
VesselGraph contract(const PixelGraph& graph, int spacing);

struct RetraceOptions {
    int corridor = 5;
    double epsilon = 1e-3;
};

/// Minimal-cost path between the segment's endpoints over all pixels within
/// Chebyshev distance `corridor` of the original path, with edge weight
/// 1 / (epsilon + B(u) + B(v)). Ties are broken on (cost, arc length, row,
/// column). Segments of at most two pixels and closed loops are returned
/// unchanged.
VesselSegment retrace(const VesselSegment& segment, const ScalarField& field,
                      const PixelGraph& graph, const RetraceOptions& options = {});

/// Maximal paths between nodes whose degree is not 2; chains of segments
/// through degree-2 nodes are concatenated. Components made only of degree-2
/// nodes come out as one closed segment.
std::vector<VesselSegment> decompose(const VesselGraph& graph);

/// decompose() packaged back into a graph: unused nodes are dropped, node
/// kinds are refreshed from degrees and anchors are rebuilt every `spacing`
/// pixels.
VesselGraph merge_chains(const VesselGraph& graph, int spacing);

/// Drops terminal segments (one end of degree 1, the other of degree >= 3)
/// shorter than `min_length`, merges the remaining chains and repeats until
/// nothing is removed.
VesselGraph prune_spurs(const VesselGraph& graph, double min_length, int spacing);

/// Retraces every segment and rebuilds anchors.
VesselGraph retrace_all(const VesselGraph& graph, const ScalarField& field, const PixelGraph& pixels,
                        const RetraceOptions& options, int spacing);

}  // namespace vasc
