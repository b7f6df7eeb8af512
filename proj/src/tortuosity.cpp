#include "vasc/tortuosity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vasc {

std::string to_string(LcMode mode) { return mode == LcMode::Arc ? "arc" : "chord"; }

LcMode parse_lc_mode(const std::string& s) {
    if (s == "chord") return LcMode::Chord;
    if (s == "arc") return LcMode::Arc;
    throw std::invalid_argument("lc_mode must be 'chord' or 'arc'");
}

std::vector<Point> to_points(std::span<const Pixel> path) {
    std::vector<Point> out;
    out.reserve(path.size());
    for (const Pixel& p : path) out.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    return out;
}

namespace {

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

double polyline_length(std::span<const Point> p, std::size_t first, std::size_t last) {
    double total = 0.0;
    for (std::size_t i = first + 1; i <= last; ++i) total += std::hypot(p[i].x - p[i - 1].x, p[i].y - p[i - 1].y);
    return total;
}

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

std::vector<SubPath> curvature_split(std::span<const Point> path, int smooth_window) {
    const std::size_t n = path.size();
    if (n < 2) return {{0, n ? n - 1 : 0}};
    const std::size_t w = static_cast<std::size_t>(std::max(smooth_window, 1));
    if (n < 2 * w || n < 5) return {{0, n - 1}};

    const std::size_t half = w / 2;
    std::vector<Point> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half, i, n - 1 - i});
        Point acc;
        for (std::size_t k = i - h; k <= i + h; ++k) {
            acc.x += path[k].x;
            acc.y += path[k].y;
        }
        const double count = static_cast<double>(2 * h + 1);
        s[i] = {acc.x / count, acc.y / count};
    }

    std::vector<double> theta(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        theta[i] = std::atan2(s[i + 1].y - s[i - 1].y, s[i + 1].x - s[i - 1].x);
    }
    std::vector<int> sign(n, 0);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double k = wrap_angle(theta[i + 1] - theta[i - 1]);
        sign[i] = k > 1e-9 ? 1 : k < -1e-9 ? -1 : 0;
    }

    struct Run {
        std::size_t begin, end;  // inclusive
        int sign;
    };
    std::vector<Run> persistent;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && sign[j + 1] == sign[i]) ++j;
        if (sign[i] != 0 && j - i + 1 >= w) persistent.push_back({i, j, sign[i]});
        i = j + 1;
    }

    std::vector<SubPath> parts;
    std::size_t start = 0;
    for (std::size_t r = 1; r < persistent.size(); ++r) {
        if (persistent[r].sign == persistent[r - 1].sign) continue;
        std::size_t split = (persistent[r - 1].end + persistent[r].begin + 1) / 2;
        split = std::clamp<std::size_t>(split, start + 1, n - 2);
        if (split <= start) continue;
        parts.push_back({start, split});
        start = split;
    }
    parts.push_back({start, n - 1});
    return parts;
}

GrisanResult grisan_tortuosity(std::span<const Point> path, std::span<const SubPath> parts, LcMode mode) {
    GrisanResult r;
    if (path.size() < 2) return r;
    double sum = 0.0;
    for (const SubPath& part : parts) {
        if (part.last >= path.size() || part.first >= part.last) {
            throw std::invalid_argument("sub-path outside the path");
        }
        const double chord = distance(path[part.first], path[part.last]);
        if (chord <= 1e-12) {
            ++r.excluded;
            continue;
        }
        ++r.parts;
        // Collinear points can sum to a hair under or over the chord.
        const double excess = polyline_length(path, part.first, part.last) - chord;
        if (excess > 1e-12 * chord) sum += excess / chord;
    }
    const double lc = mode == LcMode::Chord ? distance(path.front(), path.back())
                                            : polyline_length(path, 0, path.size() - 1);
    if (r.parts <= 1 || lc <= 1e-12) return r;
    r.value = (r.parts - 1) / lc * sum;
    return r;
}

double normalize_tortuosity(double t, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("normalization constant must be positive");
    return t / (t + c);
}

TortuosityReport tortuosity_report(const VesselGraph& graph, const Annulus& zone, const TortuosityOptions& options) {
    TortuosityReport report;
    report.zone = zone;
    report.lc_mode = options.lc_mode;

    AnnulusGraph clip = clip_to_annulus(graph, zone);
    report.warnings = clip.warnings;
    if (clip.graph.segments.empty()) {
        report.warnings.push_back("no vessels inside the tortuosity zone");
        report.c = options.c > 0.0 ? options.c : 1.0;
        return report;
    }

    // Remove short side branches, then re-join the chains they interrupted.
    const auto deg = clip.graph.degrees();
    VesselGraph trimmed = clip.graph;
    trimmed.segments.clear();
    for (const auto& s : clip.graph.segments) {
        const int a = deg[s.first()];
        const int b = deg[s.last()];
        const bool side_branch = (a == 1 && b >= 3) || (b == 1 && a >= 3);
        if (side_branch && s.path.size() < static_cast<std::size_t>(options.l_min)) continue;
        trimmed.segments.push_back(s);
    }
    const VesselGraph merged = merge_chains(trimmed, options.spacing);

    for (std::size_t i = 0; i < merged.segments.size(); ++i) {
        const auto& s = merged.segments[i];
        if (s.closed || s.path.size() < 2 * static_cast<std::size_t>(options.l_min)) continue;
        const auto points = to_points(s.path);
        const auto parts = curvature_split(points, options.smooth_window);
        const auto g = grisan_tortuosity(points, parts, options.lc_mode);
        TortuosityRecord rec;
        rec.segment_id = static_cast<int>(i);
        rec.n_subsegments = std::max(g.parts, 1);
        rec.t_g = g.value;
        rec.label = s.label;
        rec.path = s.path;
        report.records.push_back(std::move(rec));
    }

    if (options.c > 0.0) {
        report.c = options.c;
    } else {
        std::vector<double> positive;
        for (const auto& r : report.records) {
            if (r.t_g > 0.0) positive.push_back(r.t_g);
        }
        if (positive.empty()) {
            report.c = 1.0;
        } else {
            std::sort(positive.begin(), positive.end());
            const std::size_t m = positive.size();
            report.c = m % 2 ? positive[m / 2] : 0.5 * (positive[m / 2 - 1] + positive[m / 2]);
        }
    }
    for (auto& r : report.records) r.t_norm = normalize_tortuosity(r.t_g, report.c);
    return report;
}

}  // namespace vasc
