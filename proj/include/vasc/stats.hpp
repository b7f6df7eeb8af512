#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace vasc {

struct PairedRow {
    std::string id;
    double reference = 0.0;
    double candidate = 0.0;
};

struct PairedSeries {
    std::vector<PairedRow> rows;
};

/// Reads a CSV with a header row. Columns are picked by name; the defaults
/// match the plain `id,reference,candidate` layout. Throws InputError on a
/// missing column or a non-finite / non-positive ratio.
PairedSeries load_pairs(const std::filesystem::path& path, const std::string& reference_column = "reference",
                        const std::string& candidate_column = "candidate");

enum class SdMode { Population, Sample };

/// Population SD reproduces the published per-image error summary.
inline constexpr SdMode kDefaultSdMode = SdMode::Population;
inline const std::vector<double> kDefaultErrorCutoffs{0.05, 0.1};

struct AgreementSummary {
    std::size_t n = 0;
    double mean_abs_error = 0.0;
    double std_abs_error = 0.0;
    double min_abs_error = 0.0;
    double max_abs_error = 0.0;
    double mean_diff = 0.0;
    double sd_diff = 0.0;
    double loa_low = 0.0;
    double loa_high = 0.0;
    /// Rows with |candidate - reference| strictly below each cutoff.
    std::map<double, std::size_t> count_lt;
    SdMode sd_mode = kDefaultSdMode;
};

/// Throws std::invalid_argument with fewer than two rows.
AgreementSummary summarize(const PairedSeries& s, const std::vector<double>& cutoffs = kDefaultErrorCutoffs,
                           SdMode mode = kDefaultSdMode);

struct BlandAltmanPoint {
    std::string id;
    double mean = 0.0;
    double diff = 0.0;
};

std::vector<BlandAltmanPoint> bland_altman_points(const PairedSeries& s);
std::string bland_altman_csv(const std::vector<BlandAltmanPoint>& points);

nlohmann::json to_json(const AgreementSummary& summary);

}  // namespace vasc
