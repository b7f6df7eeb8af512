#include "vasc/labeling.hpp"

#include "vasc/errors.hpp"

namespace vasc {

AVProbabilityMap av_from_planes(const LikelihoodMap& artery, const LikelihoodMap& vein) {
    if (!artery.same_shape(vein)) throw InputError("artery and vein maps differ in size");
    AVProbabilityMap av{ProbabilityGrid(artery.width(), artery.height()),
                        ProbabilityGrid(vein.width(), vein.height())};
    for (std::size_t i = 0; i < artery.size(); ++i) {
        av.artery.values()[i] = artery.values()[i] / 255.0;
        av.vein.values()[i] = vein.values()[i] / 255.0;
    }
    return av;
}

AVProbabilityMap load_av_maps(const std::filesystem::path& artery, const std::filesystem::path& vein) {
    return av_from_planes(load_likelihood(artery), load_likelihood(vein));
}

AVProbabilityMap load_av_combined(const std::filesystem::path& path) {
    const DecodedImage img = read_image(path);
    if (img.channels < 2) throw InputError("combined A/V file needs two channels: " + path.string());
    LikelihoodMap a(img.width, img.height);
    LikelihoodMap v(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            a(x, y) = img.at(x, y, 0);
            v(x, y) = img.at(x, y, 1);
        }
    }
    return av_from_planes(a, v);
}

namespace {

VesselLabel decide(double pa, double pv, double tau) {
    if (pa < tau && pv < tau) return VesselLabel::Unknown;
    if (pa > pv) return VesselLabel::Artery;
    if (pa < pv) return VesselLabel::Vein;
    return VesselLabel::Unknown;
}

}  // namespace

VesselGraph label_nodes(const VesselGraph& graph, const AVProbabilityMap& av, const LabelingOptions& options) {
    VesselGraph out = graph;
    auto sample = [&](Pixel p, double& pa, double& pv) {
        if (av.artery.contains(p)) {
            pa = av.artery[p];
            pv = av.vein[p];
        } else {
            pa = pv = 0.0;
        }
    };
    for (auto& node : out.nodes) sample(node.pos, node.p_artery, node.p_vein);
    for (auto& seg : out.segments) {
        double sa = 0.0, sv = 0.0;
        for (const Pixel& p : seg.path) {
            double pa = 0.0, pv = 0.0;
            sample(p, pa, pv);
            sa += pa;
            sv += pv;
        }
        const double n = seg.path.empty() ? 1.0 : static_cast<double>(seg.path.size());
        seg.p_artery = sa / n;
        seg.p_vein = sv / n;
        seg.label = decide(seg.p_artery, seg.p_vein, options.tau_av);
    }
    refresh_node_labels(out);
    return out;
}

PropagationResult propagate(const VesselGraph& graph, const LabelingOptions& options) {
    PropagationResult result{graph, 0, false};
    auto& g = result.graph;
    const auto inc = g.incidence();
    std::vector<std::vector<int>> neighbours(g.segments.size());
    for (std::size_t i = 0; i < g.segments.size(); ++i) {
        const auto& s = g.segments[i];
        for (int end : {s.first(), s.last()}) {
            for (int j : inc[end]) {
                if (j != static_cast<int>(i)) neighbours[i].push_back(j);
            }
        }
    }
    while (result.rounds < options.max_rounds) {
        ++result.rounds;
        bool changed = false;
        for (std::size_t i = 0; i < g.segments.size(); ++i) {
            auto& seg = g.segments[i];
            if (seg.confidence() >= options.delta) continue;
            double artery = 0.0, vein = 0.0;
            for (int j : neighbours[i]) {
                const auto& nb = g.segments[j];
                const double vote = nb.arc * nb.confidence();
                if (nb.label == VesselLabel::Artery) artery += vote;
                if (nb.label == VesselLabel::Vein) vein += vote;
            }
            VesselLabel next = seg.label;
            if (artery > vein) next = VesselLabel::Artery;
            if (vein > artery) next = VesselLabel::Vein;
            if (next != seg.label) {
                seg.label = next;
                changed = true;
            }
        }
        if (!changed) {
            result.converged = true;
            break;
        }
    }
    refresh_node_labels(g);
    return result;
}

void refresh_node_labels(VesselGraph& graph) {
    std::vector<double> artery(graph.nodes.size(), 0.0);
    std::vector<double> vein(graph.nodes.size(), 0.0);
    for (const auto& s : graph.segments) {
        const double w = std::max(s.arc, 1.0);
        for (int id : s.node_ids) {
            if (s.label == VesselLabel::Artery) artery[id] += w;
            if (s.label == VesselLabel::Vein) vein[id] += w;
        }
    }
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        auto& node = graph.nodes[i];
        node.label = artery[i] > vein[i]   ? VesselLabel::Artery
                     : vein[i] > artery[i] ? VesselLabel::Vein
                                           : VesselLabel::Unknown;
    }
}

double ConfusionMatrix::sensitivity() const {
    const long total = counts[0][0] + counts[0][1] + counts[0][2];
    return total ? static_cast<double>(counts[0][0]) / total : 0.0;
}

double ConfusionMatrix::specificity() const {
    const long total = counts[1][0] + counts[1][1] + counts[1][2];
    return total ? static_cast<double>(counts[1][1]) / total : 0.0;
}

ConfusionMatrix centerline_confusion(const VesselGraph& graph, const DecodedImage& truth) {
    if (truth.channels < 3) throw InputError("ground-truth A/V image must be RGB");
    if (truth.width != graph.width || truth.height != graph.height) {
        throw InputError("ground-truth A/V image size differs from the graph");
    }
    ConfusionMatrix m;
    for (const auto& s : graph.segments) {
        const int col = s.label == VesselLabel::Artery ? 0 : s.label == VesselLabel::Vein ? 1 : 2;
        for (const Pixel& p : s.path) {
            const int r = truth.at(p.x, p.y, 0);
            const int b = truth.at(p.x, p.y, 2);
            if (r > 127 && b <= 127) ++m.counts[0][col];
            if (b > 127 && r <= 127) ++m.counts[1][col];
        }
    }
    return m;
}

}  // namespace vasc
