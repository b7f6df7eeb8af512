#include "vasc/graph_json.hpp"

#include <fstream>

#include "vasc/errors.hpp"

namespace vasc {

using nlohmann::json;

json graph_to_json(const VesselGraph& graph) {
    json nodes = json::array();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& n = graph.nodes[i];
        nodes.push_back({{"id", i},
                         {"x", n.pos.x},
                         {"y", n.pos.y},
                         {"kind", to_string(n.kind)},
                         {"bw", n.bw},
                         {"p_artery", n.p_artery},
                         {"p_vein", n.p_vein},
                         {"label", to_string(n.label)}});
    }
    json segments = json::array();
    for (std::size_t i = 0; i < graph.segments.size(); ++i) {
        const auto& s = graph.segments[i];
        json path = json::array();
        for (const Pixel& p : s.path) path.push_back({p.x, p.y});
        segments.push_back({{"id", i},
                            {"node_ids", s.node_ids},
                            {"path", std::move(path)},
                            {"arc", s.arc},
                            {"chord", s.chord},
                            {"width", s.width},
                            {"label", to_string(s.label)},
                            {"p_artery", s.p_artery},
                            {"p_vein", s.p_vein},
                            {"closed", s.closed},
                            {"retrace_failed", s.retrace_failed}});
    }
    return {{"width", graph.width}, {"height", graph.height}, {"nodes", std::move(nodes)},
            {"segments", std::move(segments)}};
}

VesselGraph graph_from_json(const json& doc) {
    VesselGraph g;
    try {
        g.width = doc.at("width").get<int>();
        g.height = doc.at("height").get<int>();
        for (const auto& n : doc.at("nodes")) {
            if (n.at("id").get<std::size_t>() != g.nodes.size()) {
                throw InputError("graph node ids must be consecutive from 0");
            }
            VesselNode node;
            node.pos = {n.at("x").get<int>(), n.at("y").get<int>()};
            node.kind = parse_node_kind(n.at("kind").get<std::string>());
            node.bw = n.value("bw", 0.0);
            node.p_artery = n.value("p_artery", 0.0);
            node.p_vein = n.value("p_vein", 0.0);
            node.label = parse_label(n.value("label", std::string("unknown")));
            g.nodes.push_back(node);
        }
        for (const auto& s : doc.at("segments")) {
            VesselSegment seg;
            seg.node_ids = s.at("node_ids").get<std::vector<int>>();
            if (seg.node_ids.size() < 2) throw InputError("segment needs two endpoint nodes");
            for (int id : seg.node_ids) {
                if (id < 0 || static_cast<std::size_t>(id) >= g.nodes.size()) {
                    throw InputError("segment refers to unknown node");
                }
            }
            for (const auto& p : s.at("path")) seg.path.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
            seg.arc = s.value("arc", arc_length(seg.path));
            seg.chord = s.value("chord", chord_length(seg.path));
            seg.width = s.value("width", 0.0);
            seg.label = parse_label(s.value("label", std::string("unknown")));
            seg.p_artery = s.value("p_artery", 0.0);
            seg.p_vein = s.value("p_vein", 0.0);
            seg.closed = s.value("closed", false);
            seg.retrace_failed = s.value("retrace_failed", false);
            g.segments.push_back(std::move(seg));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed graph document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("malformed graph document: ") + e.what());
    }
    return g;
}

void save_graph(const std::filesystem::path& path, const VesselGraph& graph) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << graph_to_json(graph).dump(1) << '\n';
}

VesselGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed graph document: ") + e.what());
    }
    return graph_from_json(doc);
}

}  // namespace vasc
