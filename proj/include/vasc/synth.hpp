#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "json.hpp"
#include "vasc/grid.hpp"
#include "vasc/labeling.hpp"
#include "vasc/morphometry.hpp"
#include "vasc/topology.hpp"

namespace vasc::synth {

enum class CurveKind { Line, Arc, Sine, Bezier };

/// One vessel of a scene description. Parameters by kind:
///   line   {x0, y0, x1, y1}
///   arc    {cx, cy, r, a0, a1}            angles in degrees
///   sine   {x0, y0, x1, y1, amplitude, wavelength, phase}
///           offset along the left normal of the base line; phase in radians
///   bezier {points: [[x,y] x 4]}          cubic
struct VesselSpec {
    CurveKind kind = CurveKind::Line;
    nlohmann::json params;
    double half_width_start = 1.0;
    double half_width_end = 1.0;
    VesselLabel label = VesselLabel::Artery;
    /// Index of the vessel this one branches from, or -1. Parent and child
    /// are exempt from the overlap check.
    int parent = -1;
};

struct SceneSpec {
    int width = 256;
    int height = 256;
    DiscGeometry disc{128.0, 128.0, 40.0};
    std::vector<VesselSpec> vessels;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

SceneSpec scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const SceneSpec& spec);

struct SyntheticVessel {
    /// Densely sampled centerline (<= 0.5 px spacing), clipped to the canvas.
    std::vector<Point> centerline;
    double half_width_start = 1.0;
    double half_width_end = 1.0;
    VesselLabel label = VesselLabel::Artery;
    int parent = -1;
    /// Arc length / chord length - 1 of the analytic curve, by quadrature.
    double true_tortuosity = 0.0;
    double arc_length = 0.0;
    double chord_length = 0.0;

    double half_width_at(double arc_fraction) const {
        return half_width_start + (half_width_end - half_width_start) * arc_fraction;
    }
};

struct Scene {
    int width = 0;
    int height = 0;
    DiscGeometry disc;
    std::vector<SyntheticVessel> vessels;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Samples every curve. Throws InputError when two unrelated vessels come
/// closer than the sum of their half-widths or a half-width is <= 0.5.
Scene generate_scene(const SceneSpec& spec);

struct RasterizedScene {
    LikelihoodMap likelihood;
    /// 8-bit probability planes (value / 255 = probability).
    LikelihoodMap artery;
    LikelihoodMap vein;

    AVProbabilityMap av() const { return av_from_planes(artery, vein); }
};

/// likelihood = 255 * exp(-d^2 / (2 (h/2)^2)) for the nearest centerline
/// distance d and local half-width h (max over vessels), plus Gaussian noise
/// when noise_sigma > 0, clamped and rounded. Inside a vessel's support
/// (d <= h) the A/V planes are 0.9 / 0.1 according to its label.
RasterizedScene rasterize(const Scene& scene);

/// Radius at which the Gaussian profile of half-width h crosses threshold t.
double crossing_radius(double half_width, double threshold);

/// Distance from a point to a polyline.
double distance_to_polyline(Point p, const std::vector<Point>& line);

// =============================================================================
// Preset scenes
// =============================================================================

struct FanSpec {
    int canvas = 896;
    double disc_diameter = 100.0;
    std::vector<double> artery_half_widths{3.0, 3.5, 4.0, 4.5, 5.0, 5.5};
    std::vector<double> vein_half_widths{4.0, 4.5, 5.0, 5.5, 6.0, 7.0};
    double start_radius_multiple = 0.6;
    double end_radius_multiple = 4.0;
};

/// 12 straight radial vessels around a centred disc, alternating artery and
/// vein, all crossing the 1D-1.5D annulus.
SceneSpec radial_fan(const FanSpec& fan = {});

/// Seeded random branching tree rooted near the disc.
SceneSpec random_tree(std::uint64_t seed, int canvas = 384, int depth = 3);

/// std::mt19937_64 with fixed conversions to uniform and normal variates;
/// the output depends only on the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();   // Box-Muller

private:
    std::mt19937_64 engine_;
};

void write_scene_outputs(const Scene& scene, const RasterizedScene& raster, const std::filesystem::path& dir);

}  // namespace vasc::synth
