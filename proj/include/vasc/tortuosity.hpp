#pragma once

#include <span>
#include <string>
#include <vector>

#include "vasc/grid.hpp"
#include "vasc/morphometry.hpp"
#include "vasc/topology.hpp"

namespace vasc {

/// Which length normalizes the sum: the full segment's chord or its arc.
enum class LcMode { Chord, Arc };

std::string to_string(LcMode mode);
LcMode parse_lc_mode(const std::string& s);

/// Inclusive point range. Consecutive parts share their boundary point, so
/// every step of the path belongs to exactly one part.
struct SubPath {
    std::size_t first = 0;
    std::size_t last = 0;
    friend bool operator==(const SubPath&, const SubPath&) = default;
};

std::vector<Point> to_points(std::span<const Pixel> path);

/// Splits a path at inflection points. Coordinates are smoothed with a
/// centred moving average of `smooth_window` samples, curvature is the
/// central difference of the tangent angle, and a split is placed between
/// two opposite-signed curvature runs that each last at least
/// `smooth_window` samples. Paths shorter than 2 * smooth_window stay whole.
std::vector<SubPath> curvature_split(std::span<const Point> path, int smooth_window = 5);

struct GrisanResult {
    double value = 0.0;
    /// Parts that entered the sum.
    int parts = 0;
    /// Parts dropped for a zero chord (closed loops).
    int excluded = 0;
};

/// T = (n - 1) / Lc * sum_i (arc_i / chord_i - 1). Excess arc below 1e-12 of
/// the chord counts as zero, so collinear parts score exactly 0.
GrisanResult grisan_tortuosity(std::span<const Point> path, std::span<const SubPath> parts,
                               LcMode mode = LcMode::Chord);

/// Maps T >= 0 to [0,1): T / (T + c).
double normalize_tortuosity(double t, double c);

struct TortuosityRecord {
    int segment_id = 0;
    int n_subsegments = 1;
    double t_g = 0.0;
    double t_norm = 0.0;
    VesselLabel label = VesselLabel::Unknown;
    std::vector<Pixel> path;
};

struct TortuosityOptions {
    /// Side branches shorter than this many pixels are removed; segments
    /// shorter than twice this are skipped.
    int l_min = 10;
    int smooth_window = 5;
    LcMode lc_mode = LcMode::Chord;
    /// Normalization constant; <= 0 means the median positive T of the run.
    double c = 0.0;
    int spacing = 10;
};

struct TortuosityReport {
    std::vector<TortuosityRecord> records;
    Annulus zone;
    LcMode lc_mode = LcMode::Chord;
    double c = 1.0;
    std::vector<std::string> warnings;
};

TortuosityReport tortuosity_report(const VesselGraph& graph, const Annulus& zone,
                                   const TortuosityOptions& options = {});

}  // namespace vasc
