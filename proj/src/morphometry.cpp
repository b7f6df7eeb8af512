#include "vasc/morphometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "vasc/errors.hpp"

namespace vasc {

void DiscGeometry::validate(int width, int height) const {
    if (!(diameter > 0.0) || !std::isfinite(diameter)) throw InputError("disc diameter must be positive");
    if (!(cx >= 0.0 && cy >= 0.0 && cx < width && cy < height)) {
        throw InputError("disc centre lies outside the image");
    }
}

DiscGeometry load_disc(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("missing disc file: " + path.string());
    try {
        nlohmann::json doc;
        in >> doc;
        DiscGeometry disc;
        disc.cx = doc.at("cx").get<double>();
        disc.cy = doc.at("cy").get<double>();
        disc.diameter = doc.contains("d") ? doc.at("d").get<double>() : doc.at("diameter").get<double>();
        return disc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed disc file " + path.string() + ": " + e.what());
    }
}

Annulus Annulus::around(const DiscGeometry& disc, double inner_multiple, double outer_multiple) {
    return {{disc.cx, disc.cy}, inner_multiple * disc.diameter, outer_multiple * disc.diameter};
}

double Annulus::radius_of(Pixel p) const { return std::hypot(p.x - center.x, p.y - center.y); }

bool Annulus::contains(Pixel p) const {
    const double r = radius_of(p);
    return r >= r_inner && r <= r_outer;
}

// =============================================================================
// Widths
// =============================================================================

std::optional<WidthEstimate> segment_width(std::span<const Pixel> path, const ScalarField& half_width) {
    if (path.size() < 4) return std::nullopt;
    std::vector<double> cumulative(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        cumulative[i] = cumulative[i - 1] + arc_length(path.subspan(i - 1, 2));
    }
    const double total = cumulative.back();
    double sum = 0.0;
    for (double fraction : {0.25, 0.5, 0.75}) {
        const double target = fraction * total;
        std::size_t best = 0;
        for (std::size_t i = 1; i < path.size(); ++i) {
            if (std::abs(cumulative[i] - target) < std::abs(cumulative[best] - target)) best = i;
        }
        const Pixel p = path[best];
        sum += half_width.contains(p) ? half_width[p] : 0.0;
    }
    WidthEstimate est;
    est.width = 2.0 * sum / 3.0;
    est.usable = est.width > 0.0;
    return est;
}

// =============================================================================
// Annulus subgraph
// =============================================================================

namespace {

bool annulus_misses_image(const Annulus& a, int width, int height) {
    if (width <= 0 || height <= 0) return true;
    const double nx = std::clamp(a.center.x, 0.0, width - 1.0);
    const double ny = std::clamp(a.center.y, 0.0, height - 1.0);
    const double nearest = std::hypot(nx - a.center.x, ny - a.center.y);
    double farthest = 0.0;
    for (double x : {0.0, width - 1.0}) {
        for (double y : {0.0, height - 1.0}) {
            farthest = std::max(farthest, std::hypot(x - a.center.x, y - a.center.y));
        }
    }
    return nearest > a.r_outer || farthest < a.r_inner;
}

}  // namespace

AnnulusGraph clip_to_annulus(const VesselGraph& graph, const Annulus& annulus) {
    AnnulusGraph out;
    out.annulus = annulus;
    out.graph.width = graph.width;
    out.graph.height = graph.height;
    if (annulus_misses_image(annulus, graph.width, graph.height)) {
        out.warnings.push_back("annulus lies outside the image");
        return out;
    }

    VesselGraph clipped;
    clipped.width = graph.width;
    clipped.height = graph.height;
    std::vector<Ring> ring;
    std::vector<int> reuse(graph.nodes.size(), -1);
    auto original = [&](int id) {
        if (reuse[id] < 0) {
            reuse[id] = static_cast<int>(clipped.nodes.size());
            VesselNode n = graph.nodes[id];
            clipped.nodes.push_back(n);
            ring.push_back(Ring::None);
        }
        return reuse[id];
    };
    auto crossing = [&](Pixel at, Pixel outside_neighbour, const VesselNode& like) {
        VesselNode n = like;
        n.pos = at;
        n.kind = NodeKind::End;
        clipped.nodes.push_back(n);
        ring.push_back(annulus.radius_of(outside_neighbour) < annulus.r_inner ? Ring::Inner : Ring::Outer);
        return static_cast<int>(clipped.nodes.size()) - 1;
    };

    for (const auto& seg : graph.segments) {
        if (seg.closed) continue;
        const auto& path = seg.path;
        std::size_t i = 0;
        while (i < path.size()) {
            if (!annulus.contains(path[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < path.size() && annulus.contains(path[j + 1])) ++j;
            if (j > i) {
                VesselSegment piece = seg;
                piece.path.assign(path.begin() + static_cast<std::ptrdiff_t>(i),
                                  path.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                piece.update_lengths();
                const VesselNode& like = graph.nodes[seg.first()];
                const int a = i == 0 ? original(seg.first()) : crossing(path[i], path[i - 1], like);
                const int b = j + 1 == path.size() ? original(seg.last()) : crossing(path[j], path[j + 1], like);
                piece.node_ids = {a, b};
                clipped.segments.push_back(std::move(piece));
            }
            i = j + 1;
        }
    }

    const auto deg = clipped.degrees();
    for (std::size_t k = 0; k < clipped.nodes.size(); ++k) {
        auto& node = clipped.nodes[k];
        node.kind = deg[k] <= 1 ? NodeKind::End : deg[k] >= 3 ? NodeKind::Branch : NodeKind::Anchor;
    }
    out.graph = std::move(clipped);
    out.ring = std::move(ring);
    return out;
}

AnnulusGraph annulus_subgraph(const VesselGraph& graph, const Annulus& annulus) {
    AnnulusGraph clip = clip_to_annulus(graph, annulus);
    AnnulusGraph out;
    out.annulus = annulus;
    out.warnings = clip.warnings;
    out.graph.width = graph.width;
    out.graph.height = graph.height;
    VesselGraph& clipped = clip.graph;
    const std::vector<Ring>& ring = clip.ring;

    // Keep components that reach both circles.
    const std::size_t n = clipped.nodes.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& s : clipped.segments) parent[find(s.first())] = find(s.last());
    std::map<int, std::pair<bool, bool>> reach;
    for (std::size_t k = 0; k < n; ++k) {
        auto& r = reach[find(static_cast<int>(k))];
        if (ring[k] == Ring::Inner) r.first = true;
        if (ring[k] == Ring::Outer) r.second = true;
    }
    std::vector<int> remap(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
        const auto r = reach[find(static_cast<int>(k))];
        if (r.first && r.second) {
            remap[k] = static_cast<int>(out.graph.nodes.size());
            out.graph.nodes.push_back(clipped.nodes[k]);
            out.ring.push_back(ring[k]);
        }
    }
    for (auto& s : clipped.segments) {
        if (remap[s.first()] < 0) continue;
        s.node_ids = {remap[s.first()], remap[s.last()]};
        out.graph.segments.push_back(std::move(s));
    }
    const auto deg = out.graph.degrees();
    for (std::size_t k = 0; k < out.graph.nodes.size(); ++k) {
        auto& node = out.graph.nodes[k];
        node.kind = deg[k] <= 1 ? NodeKind::End : deg[k] >= 3 ? NodeKind::Branch : NodeKind::Anchor;
    }
    return out;
}

// =============================================================================
// Routing
// =============================================================================

namespace {

// Oriented pixel path of a segment leaving `from`.
std::vector<Pixel> oriented(const VesselSegment& s, int from) {
    std::vector<Pixel> p = s.path;
    if (s.first() != from) std::reverse(p.begin(), p.end());
    return p;
}

Point direction(std::span<const Pixel> path, bool at_end, int window) {
    if (path.size() < 2) return {0.0, 0.0};
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), path.size() - 1);
    if (at_end) {
        const Pixel a = path[path.size() - 1 - w];
        const Pixel b = path.back();
        return {static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y)};
    }
    const Pixel a = path.front();
    const Pixel b = path[w];
    return {static_cast<double>(b.x - a.x), static_cast<double>(b.y - a.y)};
}

double turning_angle(Point in, Point out) {
    const double ni = std::hypot(in.x, in.y);
    const double no = std::hypot(out.x, out.y);
    if (ni == 0.0 || no == 0.0) return M_PI;
    const double c = std::clamp((in.x * out.x + in.y * out.y) / (ni * no), -1.0, 1.0);
    return std::acos(c);
}

VesselLabel majority_label(const VesselGraph& g, const std::vector<int>& segs) {
    double artery = 0.0, vein = 0.0;
    for (int s : segs) {
        if (g.segments[s].label == VesselLabel::Artery) artery += g.segments[s].arc;
        if (g.segments[s].label == VesselLabel::Vein) vein += g.segments[s].arc;
    }
    if (artery > vein) return VesselLabel::Artery;
    if (vein > artery) return VesselLabel::Vein;
    return VesselLabel::Unknown;
}

}  // namespace

std::vector<VesselPath> route_vessels(const AnnulusGraph& sub, int direction_window) {
    const VesselGraph& g = sub.graph;
    const auto inc = g.incidence();
    std::vector<std::uint8_t> visited(g.segments.size(), 0);
    std::vector<VesselPath> out;

    auto local_width = [&](int node) {
        double w = 0.0;
        for (int s : inc[node]) w = std::max(w, g.segments[s].width);
        return w;
    };

    auto sweep = [&](Ring from, Ring to) {
        std::vector<int> starts;
        for (std::size_t n = 0; n < g.nodes.size(); ++n) {
            if (sub.ring[n] == from && !inc[n].empty()) starts.push_back(static_cast<int>(n));
        }
        std::stable_sort(starts.begin(), starts.end(),
                         [&](int a, int b) { return local_width(a) > local_width(b); });
        for (int start : starts) {
            int seg = -1;
            for (int s : inc[start]) {
                if (!visited[s]) {
                    seg = s;
                    break;
                }
            }
            if (seg < 0) continue;
            std::vector<int> segs{seg};
            std::vector<Pixel> path = oriented(g.segments[seg], start);
            std::vector<std::uint8_t> on_path(g.segments.size(), 0);
            on_path[seg] = 1;
            int node = g.segments[seg].first() == start ? g.segments[seg].last() : g.segments[seg].first();
            bool emit = false;
            while (true) {
                if (sub.ring[node] == to) {
                    emit = true;
                    break;
                }
                if (sub.ring[node] == from) break;
                int best = -1;
                double best_angle = 0.0;
                bool meets_visited = false;
                const Point in = direction(path, true, direction_window);
                for (int s : inc[node]) {
                    if (on_path[s]) continue;
                    if (visited[s]) {
                        meets_visited = true;
                        continue;
                    }
                    const auto next = oriented(g.segments[s], node);
                    const double angle = turning_angle(in, direction(next, false, direction_window));
                    if (best < 0 || angle < best_angle) {
                        best = s;
                        best_angle = angle;
                    }
                }
                if (best < 0) {
                    emit = meets_visited;
                    break;
                }
                const auto next = oriented(g.segments[best], node);
                path.insert(path.end(), next.begin() + 1, next.end());
                segs.push_back(best);
                on_path[best] = 1;
                node = g.segments[best].first() == node ? g.segments[best].last() : g.segments[best].first();
            }
            if (!emit) continue;
            for (int s : segs) visited[s] = 1;
            VesselPath vp;
            vp.segments = std::move(segs);
            vp.path = std::move(path);
            vp.label = majority_label(g, vp.segments);
            vp.start = from;
            out.push_back(std::move(vp));
        }
    };
    sweep(Ring::Inner, Ring::Outer);
    sweep(Ring::Outer, Ring::Inner);
    return out;
}

void measure_paths(std::vector<VesselPath>& paths, const ScalarField& half_width) {
    for (auto& p : paths) {
        const auto est = segment_width(p.path, half_width);
        p.width = est ? est->width : 0.0;
        p.usable = est && est->usable;
    }
}

// =============================================================================
// CRAE / CRVE / AVR
// =============================================================================

LabeledWidths top_k_by_label(std::span<const WidthSample> samples, std::size_t k) {
    LabeledWidths out;
    for (const auto& s : samples) {
        if (!(s.width > 0.0)) continue;
        if (s.label == VesselLabel::Artery) out.arteries.push_back(s.width);
        if (s.label == VesselLabel::Vein) out.veins.push_back(s.width);
    }
    for (auto* list : {&out.arteries, &out.veins}) {
        std::sort(list->begin(), list->end(), std::greater<>());
        if (list->size() > k) list->resize(k);
    }
    return out;
}

double knudtson_equivalent(std::span<const double> widths, double p) {
    if (widths.empty()) throw std::invalid_argument("knudtson_equivalent needs at least one width");
    std::vector<double> work(widths.begin(), widths.end());
    std::sort(work.begin(), work.end(), std::greater<>());
    std::vector<double> combined;
    while (work.size() > 1) {
        const double f = work.front();
        const double l = work.back();
        work.erase(work.begin());
        work.pop_back();
        combined.push_back(p * std::sqrt(f * f + l * l));
        if (work.size() <= 1) {
            work.insert(work.end(), combined.begin(), combined.end());
            std::sort(work.begin(), work.end(), std::greater<>());
            combined.clear();
        }
    }
    return work.front();
}

std::optional<AvrResult> compute_avr(std::span<const double> arteries, std::span<const double> veins,
                                     double artery_p, double vein_p) {
    const std::size_t n = std::min({arteries.size(), veins.size(), std::size_t{6}});
    if (n == 0) return std::nullopt;
    auto widest = [n](std::span<const double> in) {
        std::vector<double> v(in.begin(), in.end());
        std::sort(v.begin(), v.end(), std::greater<>());
        v.resize(n);
        return v;
    };
    AvrResult r;
    r.count = n;
    r.crae = knudtson_equivalent(widest(arteries), artery_p);
    r.crve = knudtson_equivalent(widest(veins), vein_p);
    r.avr = r.crae / r.crve;
    return r;
}

}  // namespace vasc
