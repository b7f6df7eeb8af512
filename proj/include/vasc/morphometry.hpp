#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vasc/grid.hpp"
#include "vasc/topology.hpp"

namespace vasc {

inline constexpr double kArteryBranchingCoefficient = 0.88;
inline constexpr double kVeinBranchingCoefficient = 0.95;

/// Optic disc centre and diameter D, in pixels.
struct DiscGeometry {
    double cx = 0.0;
    double cy = 0.0;
    double diameter = 0.0;

    /// Throws InputError unless diameter > 0 and the centre lies in the image.
    void validate(int width, int height) const;
};

/// Reads {"cx":..,"cy":..,"d":..} ("diameter" is accepted for "d").
DiscGeometry load_disc(const std::filesystem::path& path);

struct Annulus {
    Point center;
    double r_inner = 0.0;
    double r_outer = 0.0;

    /// Radii given as multiples of the disc diameter.
    static Annulus around(const DiscGeometry& disc, double inner_multiple, double outer_multiple);
    bool contains(Pixel p) const;
    double radius_of(Pixel p) const;
};

// =============================================================================
// Widths
// =============================================================================

struct WidthEstimate {
    double width = 0.0;
    /// False when every sample fell off the mask (width 0).
    bool usable = false;
};

/// Twice the mean half-width at the path pixels nearest to 25%, 50% and 75%
/// of the arc length. Paths shorter than 4 pixels give no estimate.
std::optional<WidthEstimate> segment_width(std::span<const Pixel> path, const ScalarField& half_width);

// =============================================================================
// Annulus extraction and routing
// =============================================================================

enum class Ring { None, Inner, Outer };

struct AnnulusGraph {
    VesselGraph graph;
    /// Which circle each node was cut at.
    std::vector<Ring> ring;
    Annulus annulus;
    std::vector<std::string> warnings;
};

/// Clips every open segment to the annulus; a new end node is created
/// wherever a path crosses one of the circles.
AnnulusGraph clip_to_annulus(const VesselGraph& graph, const Annulus& annulus);

/// clip_to_annulus() minus the connected components that do not reach both
/// circles.
AnnulusGraph annulus_subgraph(const VesselGraph& graph, const Annulus& annulus);

struct VesselPath {
    std::vector<int> segments;
    std::vector<Pixel> path;
    VesselLabel label = VesselLabel::Unknown;
    double width = 0.0;
    bool usable = false;
    Ring start = Ring::None;
};

/// Greedy sweep from inner-circle end nodes outward, then from outer-circle
/// end nodes inward over unvisited segments. At branch nodes the unvisited
/// continuation with the smallest turning angle is taken (directions are
/// averaged over the last / first `direction_window` pixels). A walk is
/// emitted when it reaches the opposite circle or stops at a node where it
/// meets an already emitted vessel. Emitted paths are segment-disjoint.
std::vector<VesselPath> route_vessels(const AnnulusGraph& sub, int direction_window = 5);

/// Fills width/usable for every path from the half-width field.
void measure_paths(std::vector<VesselPath>& paths, const ScalarField& half_width);

// =============================================================================
// CRAE / CRVE / AVR
// =============================================================================

struct WidthSample {
    int id = 0;
    double width = 0.0;
    VesselLabel label = VesselLabel::Unknown;
};

struct LabeledWidths {
    std::vector<double> arteries;
    std::vector<double> veins;
};

/// The k widest arteries and veins, each list descending. Unknown labels and
/// non-positive widths are skipped.
LabeledWidths top_k_by_label(std::span<const WidthSample> samples, std::size_t k = 6);

/// Knudtson revised iteration: pair the widest with the narrowest, combine as
/// p * sqrt(f^2 + l^2), carry any middle value, repeat on the combined list
/// until one value remains. Throws std::invalid_argument on an empty list.
double knudtson_equivalent(std::span<const double> widths, double p);

struct AvrResult {
    double crae = 0.0;
    double crve = 0.0;
    double avr = 0.0;
    /// Widths used per side, min(|A|, |V|, 6).
    std::size_t count = 0;
};

/// CRAE(A) / CRVE(V) over the min(|A|, |V|, 6) widest of each side.
/// Empty when either side is empty.
std::optional<AvrResult> compute_avr(std::span<const double> arteries, std::span<const double> veins,
                                     double artery_p = kArteryBranchingCoefficient,
                                     double vein_p = kVeinBranchingCoefficient);

}  // namespace vasc
