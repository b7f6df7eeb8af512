#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vasc/image_io.hpp"
#include "vasc/labeling.hpp"
#include "vasc/morphometry.hpp"
#include "vasc/raster.hpp"
#include "vasc/stats.hpp"
#include "vasc/tortuosity.hpp"

namespace vasc {

struct PipelineConfig {
    std::vector<int> thresholds = kDefaultThresholds;
    /// Threshold list positions start at this index in the B_w weighting.
    int bw_index_base = 0;
    /// Enclosed holes of the union skeleton up to this inradius are filled.
    double fill_radius = 2.0;
    int spacing = 10;
    int corridor = 5;
    double epsilon = 1e-3;
    /// Terminal branches shorter than this (pixels of arc) are removed
    /// before labeling.
    double spur_length = 10.0;
    double delta = 0.1;
    double tau_av = 0.05;
    int max_rounds = 10;
    int width_threshold = 100;
    double half_width_offset = 0.5;
    double avr_inner = 1.0;
    double avr_outer = 1.5;
    int top_k = 6;
    double tort_inner = 1.5;
    double tort_outer = 2.5;
    int l_min = 10;
    int smooth_window = 5;
    LcMode lc_mode = LcMode::Chord;
    /// T_norm constant; 0 picks the median positive T_g of the image.
    double c = 0.0;
    /// Downscale so the larger side is at most this; 0 disables.
    int max_dim = 0;
    std::uint64_t seed = 0;

    /// Throws ConfigError on any out-of-range field.
    void validate() const;
    nlohmann::json to_json() const;
    /// Requires "schema": 1; unknown keys are rejected. Missing keys keep
    /// their defaults.
    static PipelineConfig from_json(const nlohmann::json& doc);
    static PipelineConfig load(const std::filesystem::path& path);
};

struct Analysis {
    VesselGraph graph;
    std::size_t union_pixels = 0;
    int propagation_rounds = 0;
    bool propagation_converged = true;
    Annulus avr_annulus;
    std::vector<VesselPath> vessels;
    std::optional<AvrResult> avr;
    LabeledWidths widths;
    TortuosityReport tortuosity;
    /// Multiply pixel lengths by this to return to input units.
    double scale_back = 1.0;
    std::vector<std::string> warnings;
};

struct ExtractedGraph {
    VesselGraph graph;
    ScalarField field;  // normalized background distance
    std::size_t union_pixels = 0;  // before consolidation
};

/// Unlabeled centerline graph: consolidated union skeleton, contraction, spur
/// pruning, retrace, pruning again.
ExtractedGraph extract_graph(const LikelihoodMap& likelihood, const PipelineConfig& config);

/// Runs the whole chain in memory. Inputs must share dimensions.
Analysis analyze(const LikelihoodMap& likelihood, const AVProbabilityMap& av, const DiscGeometry& disc,
                 const PipelineConfig& config);

struct SingleInputs {
    std::optional<std::filesystem::path> image;
    std::filesystem::path likelihood;
    ChannelSelect likelihood_channel = ChannelSelect::None;
    std::filesystem::path av_artery;
    std::filesystem::path av_vein;
    std::filesystem::path disc;
};

/// Loads and validates every input before anything is written, then writes
/// report.json, graph.json and overlay.png into `out_dir`. Returns the report.
nlohmann::json run_single(const SingleInputs& inputs, const PipelineConfig& config,
                          const std::filesystem::path& out_dir);

struct BatchOutcome {
    nlohmann::json report;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
};

/// Manifest CSV with header `id,likelihood,av_artery,av_vein,disc` plus the
/// optional columns `image` and `reference_avr`. Relative paths resolve
/// against the manifest's directory. Each row goes to `out_dir/<id>/`; a
/// failing row is recorded and does not affect the others.
BatchOutcome run_batch(const std::filesystem::path& manifest, const PipelineConfig& config,
                       const std::filesystem::path& out_dir, unsigned threads = 0);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace vasc
