#pragma once

#include <filesystem>

#include "json.hpp"
#include "vasc/topology.hpp"

namespace vasc {

/// {width, height, nodes:[{id,x,y,kind,bw,p_artery,p_vein,label}],
///  segments:[{id,node_ids,path:[[x,y]...],arc,chord,width,label,...}]}
nlohmann::json graph_to_json(const VesselGraph& graph);
VesselGraph graph_from_json(const nlohmann::json& doc);

void save_graph(const std::filesystem::path& path, const VesselGraph& graph);
VesselGraph load_graph(const std::filesystem::path& path);

}  // namespace vasc
