#include "vasc/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "vasc/raster.hpp"

namespace vasc {

namespace {

constexpr std::array<int, 8> kDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy{-1, -1, 0, 1, 1, 1, 0, -1};

double step_length(Pixel a, Pixel b) {
    return (a.x != b.x && a.y != b.y) ? std::sqrt(2.0) : 1.0;
}

}  // namespace

std::string to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::End: return "end";
        case NodeKind::Branch: return "branch";
        case NodeKind::Anchor: return "anchor";
    }
    return "end";
}

std::string to_string(VesselLabel label) {
    switch (label) {
        case VesselLabel::Artery: return "artery";
        case VesselLabel::Vein: return "vein";
        case VesselLabel::Unknown: return "unknown";
    }
    return "unknown";
}

NodeKind parse_node_kind(const std::string& s) {
    if (s == "end") return NodeKind::End;
    if (s == "branch") return NodeKind::Branch;
    if (s == "anchor") return NodeKind::Anchor;
    throw std::invalid_argument("unknown node kind: " + s);
}

VesselLabel parse_label(const std::string& s) {
    if (s == "artery") return VesselLabel::Artery;
    if (s == "vein") return VesselLabel::Vein;
    if (s == "unknown") return VesselLabel::Unknown;
    throw std::invalid_argument("unknown label: " + s);
}

double arc_length(std::span<const Pixel> path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) total += step_length(path[i - 1], path[i]);
    return total;
}

double chord_length(std::span<const Pixel> path) {
    if (path.size() < 2) return 0.0;
    return std::hypot(path.back().x - path.front().x, path.back().y - path.front().y);
}

double VesselSegment::confidence() const { return std::abs(p_artery - p_vein); }

void VesselSegment::update_lengths() {
    arc = arc_length(path);
    chord = chord_length(path);
}

// =============================================================================
// PixelGraph
// =============================================================================

PixelGraph PixelGraph::from_mask(const BinaryMask& mask) {
    PixelGraph g;
    g.width_ = mask.width();
    g.height_ = mask.height();
    g.index_.assign(mask.size(), -1);
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask(x, y)) {
                g.index_[mask.index(x, y)] = static_cast<int>(g.nodes_.size());
                g.nodes_.push_back({x, y});
            }
        }
    }
    return g;
}

bool PixelGraph::has(Pixel p) const { return id(p) >= 0; }

int PixelGraph::id(Pixel p) const {
    if (p.x < 0 || p.y < 0 || p.x >= width_ || p.y >= height_) return -1;
    return index_[static_cast<std::size_t>(p.y) * width_ + p.x];
}

std::vector<int> PixelGraph::neighbours(int node) const {
    std::vector<int> out;
    const Pixel p = nodes_[node];
    for (int k = 0; k < 8; ++k) {
        const int n = id({p.x + kDx[k], p.y + kDy[k]});
        if (n >= 0) out.push_back(n);
    }
    return out;
}

std::vector<int> PixelGraph::skeleton_neighbours(int node) const {
    std::vector<int> out;
    const Pixel p = nodes_[node];
    for (int k = 0; k < 8; ++k) {
        const Pixel q{p.x + kDx[k], p.y + kDy[k]};
        const int n = id(q);
        if (n < 0) continue;
        if (k % 2 == 1 && (has({q.x, p.y}) || has({p.x, q.y}))) continue;
        out.push_back(n);
    }
    return out;
}

std::size_t PixelGraph::edge_count() const {
    std::size_t twice = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) twice += neighbours(static_cast<int>(i)).size();
    return twice / 2;
}

double PixelGraph::skeleton_edge_length() const {
    double twice = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (int n : skeleton_neighbours(static_cast<int>(i))) twice += step_length(nodes_[i], nodes_[n]);
    }
    return twice / 2.0;
}

BinaryMask PixelGraph::mask() const {
    BinaryMask m(width_, height_);
    for (const Pixel& p : nodes_) m[p] = 1;
    return m;
}

BinaryMask union_mask(const LikelihoodMap& map, std::span<const int> thresholds) {
    validate_thresholds(thresholds);
    BinaryMask acc(map.width(), map.height());
    for (int t : thresholds) {
        const BinaryMask skel = thin(binarize(map, t));
        for (std::size_t i = 0; i < acc.size(); ++i) acc.values()[i] |= skel.values()[i];
    }
    return acc;
}

BinaryMask consolidate(const BinaryMask& skeletons, double max_hole_radius) {
    const int w = skeletons.width();
    const int h = skeletons.height();
    // Background components, 4-connected (dual of 8-connected foreground).
    std::vector<int> comp(static_cast<std::size_t>(w) * h, -1);
    std::vector<bool> open;
    std::vector<Pixel> stack;
    int n = 0;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const std::size_t i0 = static_cast<std::size_t>(y0) * w + x0;
            if (skeletons(x0, y0) || comp[i0] >= 0) continue;
            bool touches = false;
            comp[i0] = n;
            stack.push_back({x0, y0});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                if (p.x == 0 || p.y == 0 || p.x == w - 1 || p.y == h - 1) touches = true;
                constexpr int dx[4] = {1, -1, 0, 0};
                constexpr int dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int x = p.x + dx[k];
                    const int y = p.y + dy[k];
                    if (x < 0 || y < 0 || x >= w || y >= h || skeletons(x, y)) continue;
                    const std::size_t i = static_cast<std::size_t>(y) * w + x;
                    if (comp[i] >= 0) continue;
                    comp[i] = n;
                    stack.push_back({x, y});
                }
            }
            open.push_back(touches);
            ++n;
        }
    }

    BinaryMask holes(w, h);
    for (std::size_t i = 0; i < comp.size(); ++i)
        if (comp[i] >= 0 && !open[static_cast<std::size_t>(comp[i])]) holes.values()[i] = 1;
    const ScalarField inradius = distance_transform(holes);
    std::vector<double> widest(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < comp.size(); ++i)
        if (holes.values()[i]) widest[comp[i]] = std::max(widest[comp[i]], inradius.values()[i]);

    BinaryMask filled = skeletons;
    for (std::size_t i = 0; i < comp.size(); ++i)
        if (holes.values()[i] && widest[comp[i]] <= max_hole_radius) filled.values()[i] = 1;
    return thin(filled);
}

PixelGraph union_graph(const LikelihoodMap& map, std::span<const int> thresholds) {
    return PixelGraph::from_mask(union_mask(map, thresholds));
}

// =============================================================================
// VesselGraph helpers
// =============================================================================

std::vector<int> VesselGraph::degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const auto& s : segments) {
        ++deg[s.first()];
        ++deg[s.last()];
    }
    return deg;
}

std::vector<std::vector<int>> VesselGraph::incidence() const {
    std::vector<std::vector<int>> inc(nodes.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        inc[s.first()].push_back(static_cast<int>(i));
        if (s.last() != s.first()) inc[s.last()].push_back(static_cast<int>(i));
    }
    return inc;
}

namespace {

// Replaces every segment's interior node ids with fresh anchors placed every
// `spacing` path pixels. Endpoint nodes are left untouched; previous anchor
// nodes are discarded and the node list is compacted.
VesselGraph rebuild_anchors(const VesselGraph& in, int spacing) {
    VesselGraph out;
    out.width = in.width;
    out.height = in.height;
    std::vector<int> remap(in.nodes.size(), -1);
    auto keep = [&](int old) {
        if (remap[old] < 0) {
            remap[old] = static_cast<int>(out.nodes.size());
            out.nodes.push_back(in.nodes[old]);
        }
        return remap[old];
    };
    for (std::size_t i = 0; i < in.nodes.size(); ++i) {
        if (in.nodes[i].kind != NodeKind::Anchor) keep(static_cast<int>(i));
    }
    for (const auto& s : in.segments) {
        keep(s.first());
        keep(s.last());
    }
    for (const auto& s : in.segments) {
        VesselSegment seg = s;
        seg.node_ids.clear();
        seg.node_ids.push_back(remap[s.first()]);
        if (spacing > 0) {
            for (std::size_t k = static_cast<std::size_t>(spacing); k + 1 < s.path.size(); k += static_cast<std::size_t>(spacing)) {
                VesselNode anchor;
                anchor.pos = s.path[k];
                anchor.kind = NodeKind::Anchor;
                anchor.label = s.label;
                seg.node_ids.push_back(static_cast<int>(out.nodes.size()));
                out.nodes.push_back(anchor);
            }
        }
        seg.node_ids.push_back(remap[s.last()]);
        out.segments.push_back(std::move(seg));
    }
    return out;
}

}  // namespace

// =============================================================================
// Contraction
// =============================================================================

VesselGraph contract(const PixelGraph& graph, int spacing) {
    if (spacing < 2) throw std::invalid_argument("anchor spacing must be >= 2");
    VesselGraph out;
    out.width = graph.width();
    out.height = graph.height();

    const std::size_t n = graph.node_count();
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i) adj[i] = graph.skeleton_neighbours(static_cast<int>(i));

    // Touching branch pixels form one junction, represented by the member
    // nearest the cluster centroid. Ends are always single pixels.
    std::vector<int> vnode(n, -1);
    std::vector<int> cluster(n, -1);
    std::vector<int> toward_rep(n, -1);  // next pixel on the way to the representative
    std::vector<int> members;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = adj[i].size();
        if (d == 2 || vnode[i] >= 0) continue;
        VesselNode node;
        node.kind = d >= 3 ? NodeKind::Branch : NodeKind::End;
        const int id = static_cast<int>(out.nodes.size());
        members.assign(1, static_cast<int>(i));
        cluster[i] = id;
        if (d >= 3) {
            for (std::size_t k = 0; k < members.size(); ++k) {
                for (int c : adj[members[k]]) {
                    if (cluster[c] < 0 && adj[c].size() >= 3) {
                        cluster[c] = id;
                        members.push_back(c);
                    }
                }
            }
        }
        double cx = 0.0, cy = 0.0;
        for (int m : members) {
            cx += graph.nodes()[m].x;
            cy += graph.nodes()[m].y;
        }
        cx /= static_cast<double>(members.size());
        cy /= static_cast<double>(members.size());
        int rep = members.front();
        double best = std::numeric_limits<double>::infinity();
        for (int m : members) {
            const double dx = graph.nodes()[m].x - cx;
            const double dy = graph.nodes()[m].y - cy;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best || (d2 == best && m < rep)) {
                best = d2;
                rep = m;
            }
        }
        for (int m : members) vnode[m] = id;
        // BFS tree inside the cluster rooted at the representative.
        std::vector<int> frontier{rep};
        toward_rep[rep] = rep;
        for (std::size_t k = 0; k < frontier.size(); ++k) {
            for (int c : adj[frontier[k]]) {
                if (cluster[c] == id && toward_rep[c] < 0) {
                    toward_rep[c] = frontier[k];
                    frontier.push_back(c);
                }
            }
        }
        node.pos = graph.nodes()[rep];
        out.nodes.push_back(node);
    }

    std::unordered_set<std::uint64_t> used;
    auto edge_key = [](int a, int b) {
        const auto lo = static_cast<std::uint64_t>(std::min(a, b));
        const auto hi = static_cast<std::uint64_t>(std::max(a, b));
        return (hi << 32) | lo;
    };
    std::vector<std::uint8_t> visited(n, 0);

    auto walk = [&](int start, int first_step) {
        VesselSegment seg;
        if (cluster[start] >= 0) {
            std::vector<Pixel> lead;
            for (int m = start; m != toward_rep[m]; m = toward_rep[m]) lead.push_back(graph.nodes()[toward_rep[m]]);
            seg.path.assign(lead.rbegin(), lead.rend());
        }
        seg.path.push_back(graph.nodes()[start]);
        int prev = start;
        int cur = first_step;
        used.insert(edge_key(prev, cur));
        visited[start] = 1;
        while (true) {
            seg.path.push_back(graph.nodes()[cur]);
            visited[cur] = 1;
            if (vnode[cur] >= 0 || cur == start) break;
            int next = -1;
            for (int c : adj[cur]) {
                if (c != prev && !used.count(edge_key(cur, c))) {
                    next = c;
                    break;
                }
            }
            if (next < 0) break;
            used.insert(edge_key(cur, next));
            prev = cur;
            cur = next;
        }
        if (cluster[cur] >= 0) {
            for (int m = cur; m != toward_rep[m]; m = toward_rep[m]) seg.path.push_back(graph.nodes()[toward_rep[m]]);
        }
        seg.node_ids = {vnode[start], vnode[cur]};
        seg.closed = seg.path.front() == seg.path.back();
        seg.update_lengths();
        out.segments.push_back(std::move(seg));
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (vnode[i] < 0) continue;
        for (int c : adj[i]) {
            if (cluster[c] >= 0 && cluster[c] == cluster[i]) continue;
            if (!used.count(edge_key(static_cast<int>(i), c))) walk(static_cast<int>(i), c);
        }
    }
    // Whatever is left lies on cycles made only of degree-2 pixels.
    for (std::size_t i = 0; i < n; ++i) {
        if (visited[i] || vnode[i] >= 0) continue;
        VesselNode seed;
        seed.pos = graph.nodes()[i];
        seed.kind = NodeKind::Anchor;
        vnode[i] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(seed);
        walk(static_cast<int>(i), adj[i].front());
    }
    return rebuild_anchors(out, spacing);
}

// =============================================================================
// Retrace
// =============================================================================

VesselSegment retrace(const VesselSegment& segment, const ScalarField& field, const PixelGraph& graph,
                      const RetraceOptions& options) {
    if (segment.path.size() <= 2 || segment.closed) return segment;
    if (field.width() != graph.width() || field.height() != graph.height()) {
        throw std::invalid_argument("field does not cover the graph extent");
    }
    if (options.epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    const Pixel source = segment.path.front();
    const Pixel target = segment.path.back();

    // Corridor bounding box, then a local occupancy mask.
    int x0 = source.x, x1 = source.x, y0 = source.y, y1 = source.y;
    for (const Pixel& p : segment.path) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const int r = options.corridor;
    x0 = std::max(0, x0 - r);
    y0 = std::max(0, y0 - r);
    x1 = std::min(field.width() - 1, x1 + r);
    y1 = std::min(field.height() - 1, y1 + r);
    const int bw = x1 - x0 + 1;
    const int bh = y1 - y0 + 1;
    auto local = [&](int x, int y) { return static_cast<std::size_t>(y - y0) * bw + (x - x0); };

    std::vector<std::uint8_t> inside(static_cast<std::size_t>(bw) * bh, 0);
    for (const Pixel& p : segment.path) {
        for (int y = std::max(y0, p.y - r); y <= std::min(y1, p.y + r); ++y) {
            for (int x = std::max(x0, p.x - r); x <= std::min(x1, p.x + r); ++x) inside[local(x, y)] = 1;
        }
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(inside.size(), kInf);
    std::vector<double> length(inside.size(), kInf);
    std::vector<std::int64_t> parent(inside.size(), -1);
    std::vector<std::uint8_t> done(inside.size(), 0);

    using Entry = std::tuple<double, double, int, int>;  // cost, arc, row, col
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    cost[local(source.x, source.y)] = 0.0;
    length[local(source.x, source.y)] = 0.0;
    queue.emplace(0.0, 0.0, source.y, source.x);

    while (!queue.empty()) {
        const auto [c, len, y, x] = queue.top();
        queue.pop();
        const std::size_t u = local(x, y);
        if (done[u]) continue;
        done[u] = 1;
        if (x == target.x && y == target.y) break;
        const double bu = field(x, y);
        for (int k = 0; k < 8; ++k) {
            const int nx = x + kDx[k];
            const int ny = y + kDy[k];
            if (nx < x0 || nx > x1 || ny < y0 || ny > y1) continue;
            const std::size_t v = local(nx, ny);
            if (!inside[v] || done[v]) continue;
            const double nc = c + 1.0 / (options.epsilon + bu + field(nx, ny));
            const double nl = len + ((k % 2) ? std::sqrt(2.0) : 1.0);
            if (std::tie(nc, nl) < std::tie(cost[v], length[v])) {
                cost[v] = nc;
                length[v] = nl;
                parent[v] = static_cast<std::int64_t>(u);
                queue.emplace(nc, nl, ny, nx);
            }
        }
    }

    VesselSegment out = segment;
    const std::size_t t = local(target.x, target.y);
    if (!done[t]) {
        out.retrace_failed = true;
        return out;
    }
    std::vector<Pixel> path;
    for (std::int64_t at = static_cast<std::int64_t>(t); at >= 0; at = parent[static_cast<std::size_t>(at)]) {
        path.push_back({x0 + static_cast<int>(at % bw), y0 + static_cast<int>(at / bw)});
    }
    std::reverse(path.begin(), path.end());
    out.path = std::move(path);
    out.retrace_failed = false;
    out.update_lengths();
    // anchors are rebuilt by the caller; keep only the endpoints
    out.node_ids = {segment.first(), segment.last()};
    return out;
}

VesselGraph retrace_all(const VesselGraph& graph, const ScalarField& field, const PixelGraph& pixels,
                        const RetraceOptions& options, int spacing) {
    VesselGraph out = graph;
    for (auto& seg : out.segments) seg = retrace(seg, field, pixels, options);
    for (auto& node : out.nodes) {
        if (field.contains(node.pos)) node.bw = field[node.pos];
    }
    return rebuild_anchors(out, spacing);
}

// =============================================================================
// Decompose
// =============================================================================

namespace {

VesselSegment reversed(const VesselSegment& s) {
    VesselSegment r = s;
    std::reverse(r.path.begin(), r.path.end());
    std::reverse(r.node_ids.begin(), r.node_ids.end());
    return r;
}

// Appends `next` (already oriented to start where `acc` ends).
void append(VesselSegment& acc, const VesselSegment& next) {
    const double wa = acc.arc;
    const double wb = next.arc;
    const double total = wa + wb;
    auto blend = [&](double a, double b) { return total > 0.0 ? (a * wa + b * wb) / total : 0.5 * (a + b); };
    acc.p_artery = blend(acc.p_artery, next.p_artery);
    acc.p_vein = blend(acc.p_vein, next.p_vein);
    acc.width = blend(acc.width, next.width);
    if (acc.label != next.label) {
        if (acc.label == VesselLabel::Unknown || (next.label != VesselLabel::Unknown && wb > wa)) {
            acc.label = next.label;
        }
    }
    acc.retrace_failed = acc.retrace_failed || next.retrace_failed;
    acc.path.insert(acc.path.end(), next.path.begin() + 1, next.path.end());
    acc.node_ids.insert(acc.node_ids.end(), next.node_ids.begin() + 1, next.node_ids.end());
    acc.update_lengths();
}

}  // namespace

std::vector<VesselSegment> decompose(const VesselGraph& graph) {
    const auto deg = graph.degrees();
    const auto inc = graph.incidence();
    std::vector<std::uint8_t> used(graph.segments.size(), 0);
    std::vector<VesselSegment> out;

    auto through = [&](int node) { return deg[node] == 2 && inc[node].size() == 2; };

    auto extend = [&](VesselSegment acc) {
        while (through(acc.last()) && acc.last() != acc.first()) {
            const int node = acc.last();
            int next = -1;
            for (int s : inc[node]) {
                if (!used[s]) next = s;
            }
            if (next < 0) break;
            used[next] = 1;
            const auto& seg = graph.segments[next];
            append(acc, seg.first() == node ? seg : reversed(seg));
        }
        acc.closed = acc.path.size() > 1 && acc.path.front() == acc.path.back() && acc.first() == acc.last();
        return acc;
    };

    for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
        if (through(static_cast<int>(n))) continue;
        for (int s : inc[n]) {
            if (used[s]) continue;
            used[s] = 1;
            const auto& seg = graph.segments[s];
            out.push_back(extend(seg.first() == static_cast<int>(n) ? seg : reversed(seg)));
        }
    }
    for (std::size_t s = 0; s < graph.segments.size(); ++s) {
        if (used[s]) continue;
        // A cycle of degree-2 nodes; start at its smallest node id.
        int seed_seg = static_cast<int>(s);
        int seed_node = graph.segments[s].first();
        std::vector<int> stack{static_cast<int>(s)};
        std::vector<std::uint8_t> seen(graph.segments.size(), 0);
        seen[s] = 1;
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            for (int end : {graph.segments[cur].first(), graph.segments[cur].last()}) {
                if (end < seed_node) {
                    seed_node = end;
                    seed_seg = cur;
                }
                for (int nb : inc[end]) {
                    if (!seen[nb] && !used[nb]) {
                        seen[nb] = 1;
                        stack.push_back(nb);
                    }
                }
            }
        }
        // Among the two segments at the seed node take the lower id.
        for (int nb : inc[seed_node]) {
            if (!used[nb]) {
                seed_seg = std::min(seed_seg, nb);
            }
        }
        used[seed_seg] = 1;
        const auto& seg = graph.segments[seed_seg];
        out.push_back(extend(seg.first() == seed_node ? seg : reversed(seg)));
    }
    return out;
}

VesselGraph merge_chains(const VesselGraph& graph, int spacing) {
    VesselGraph merged;
    merged.width = graph.width;
    merged.height = graph.height;
    merged.nodes = graph.nodes;
    merged.segments = decompose(graph);
    // Drop nodes that are no longer segment endpoints (keeping isolated ends).
    const auto old_deg = graph.degrees();
    std::vector<std::uint8_t> endpoint(graph.nodes.size(), 0);
    for (const auto& s : merged.segments) {
        endpoint[s.first()] = 1;
        endpoint[s.last()] = 1;
    }
    for (std::size_t i = 0; i < merged.nodes.size(); ++i) {
        if (!endpoint[i] && !(old_deg[i] == 0 && graph.nodes[i].kind == NodeKind::End)) {
            merged.nodes[i].kind = NodeKind::Anchor;
        }
    }
    VesselGraph out = rebuild_anchors(merged, spacing);
    const auto deg = out.degrees();
    std::vector<std::uint8_t> interior(out.nodes.size(), 0);
    for (const auto& s : out.segments)
        for (std::size_t k = 1; k + 1 < s.node_ids.size(); ++k) interior[s.node_ids[k]] = 1;
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        auto& node = out.nodes[i];
        if (interior[i]) {
            node.kind = NodeKind::Anchor;
        } else if (deg[i] <= 1) {
            node.kind = NodeKind::End;
        } else if (deg[i] >= 3) {
            node.kind = NodeKind::Branch;
        } else if (node.kind != NodeKind::Anchor) {
            // Only loop seeds keep degree 2 after merging.
            node.kind = NodeKind::Anchor;
        }
    }
    return out;
}

VesselGraph prune_spurs(const VesselGraph& graph, double min_length, int spacing) {
    VesselGraph current = graph;
    // Removing a spur can turn its junction into a chain and expose another.
    while (true) {
        const auto deg = current.degrees();
        VesselGraph kept;
        kept.width = current.width;
        kept.height = current.height;
        kept.nodes = current.nodes;
        for (const auto& s : current.segments) {
            const int a = deg[s.first()];
            const int b = deg[s.last()];
            const bool terminal = (a == 1 && b >= 3) || (b == 1 && a >= 3);
            if (terminal && s.arc < min_length) continue;
            kept.segments.push_back(s);
        }
        if (kept.segments.size() == current.segments.size()) return merge_chains(current, spacing);
        // Pruned spur tips become orphans; mark them so merge_chains drops them.
        const auto new_deg = kept.degrees();
        for (std::size_t i = 0; i < kept.nodes.size(); ++i) {
            if (new_deg[i] == 0 && deg[i] > 0) kept.nodes[i].kind = NodeKind::Anchor;
        }
        current = merge_chains(kept, spacing);
    }
}

}  // namespace vasc
