#include "vasc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vasc/errors.hpp"

namespace vasc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double sd(const std::vector<double>& v, double mean, SdMode mode) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double denom = mode == SdMode::Population ? v.size() : v.size() - 1.0;
    return std::sqrt(ss / denom);
}

double mean(const std::vector<double>& v) {
    double total = 0.0;
    for (double x : v) total += x;
    return total / static_cast<double>(v.size());
}

}  // namespace

PairedSeries load_pairs(const std::filesystem::path& path, const std::string& reference_column,
                        const std::string& candidate_column) {
    std::ifstream in(path);
    if (!in) throw InputError("missing file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty pairs file: " + path.string());
    const auto header = split_csv_line(line);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw InputError("pairs file lacks column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t id_col = column("id");
    const std::size_t ref_col = column(reference_column);
    const std::size_t cand_col = column(candidate_column);

    PairedSeries s;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < header.size()) {
            throw InputError("pairs file line " + std::to_string(line_no) + ": too few columns");
        }
        PairedRow row;
        row.id = cells[id_col];
        try {
            row.reference = std::stod(cells[ref_col]);
            row.candidate = std::stod(cells[cand_col]);
        } catch (const std::exception&) {
            throw InputError("pairs file line " + std::to_string(line_no) + ": not a number");
        }
        if (!std::isfinite(row.reference) || !std::isfinite(row.candidate) || row.reference <= 0.0 ||
            row.candidate <= 0.0) {
            throw InputError("pairs file line " + std::to_string(line_no) + ": ratios must be finite and > 0");
        }
        s.rows.push_back(std::move(row));
    }
    return s;
}

AgreementSummary summarize(const PairedSeries& s, const std::vector<double>& cutoffs, SdMode mode) {
    if (s.rows.size() < 2) throw std::invalid_argument("agreement statistics need at least two rows");
    std::vector<double> diff, err;
    for (const auto& r : s.rows) {
        diff.push_back(r.candidate - r.reference);
        err.push_back(std::abs(r.candidate - r.reference));
    }
    AgreementSummary out;
    out.n = s.rows.size();
    out.sd_mode = mode;
    out.mean_abs_error = mean(err);
    out.std_abs_error = sd(err, out.mean_abs_error, mode);
    out.min_abs_error = *std::min_element(err.begin(), err.end());
    out.max_abs_error = *std::max_element(err.begin(), err.end());
    out.mean_diff = mean(diff);
    out.sd_diff = sd(diff, out.mean_diff, mode);
    out.loa_low = out.mean_diff - 1.96 * out.sd_diff;
    out.loa_high = out.mean_diff + 1.96 * out.sd_diff;
    for (double c : cutoffs) {
        out.count_lt[c] = static_cast<std::size_t>(std::count_if(err.begin(), err.end(), [c](double e) { return e < c; }));
    }
    return out;
}

std::vector<BlandAltmanPoint> bland_altman_points(const PairedSeries& s) {
    if (s.rows.size() < 2) throw std::invalid_argument("agreement statistics need at least two rows");
    std::vector<BlandAltmanPoint> out;
    out.reserve(s.rows.size());
    for (const auto& r : s.rows) out.push_back({r.id, 0.5 * (r.candidate + r.reference), r.candidate - r.reference});
    return out;
}

std::string bland_altman_csv(const std::vector<BlandAltmanPoint>& points) {
    std::ostringstream out;
    out.precision(17);
    out << "id,mean,diff\n";
    for (const auto& p : points) out << p.id << ',' << p.mean << ',' << p.diff << '\n';
    return out.str();
}

nlohmann::json to_json(const AgreementSummary& s) {
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& [cutoff, count] : s.count_lt) counts.push_back({{"cutoff", cutoff}, {"count", count}});
    return {{"n", s.n},
            {"mean_abs_error", s.mean_abs_error},
            {"std_abs_error", s.std_abs_error},
            {"min_abs_error", s.min_abs_error},
            {"max_abs_error", s.max_abs_error},
            {"mean_diff", s.mean_diff},
            {"sd_diff", s.sd_diff},
            {"loa_low", s.loa_low},
            {"loa_high", s.loa_high},
            {"count_lt", std::move(counts)},
            {"sd_mode", s.sd_mode == SdMode::Population ? "population" : "sample"}};
}

}  // namespace vasc
