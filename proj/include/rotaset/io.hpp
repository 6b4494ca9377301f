#pragma once

#include "rotaset/deviations.hpp"
#include "rotaset/estimation.hpp"
#include "rotaset/geometry.hpp"
#include "rotaset/perturbation.hpp"
#include "rotaset/torus_maps.hpp"
#include "rotaset/transition_graph.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace rotaset {

using nlohmann::json;

// Polygon schema: {"vertices":[{"x":"p/q","y":"r/s"},...],
//                  "float_vertices":[[x,y],...]}, rationals as reduced strings,
// counterclockwise; degenerate cases carry 1 or 2 vertices.
json polygon_to_json(const ConvexRationalPolygon& P);
ConvexRationalPolygon polygon_from_json(const json& j);

json pseudo_polygon_to_json(const PseudoRotationPolygon& P, GraphMode mode, double delta,
                            int grid);

// Map-family config: {"family":"coupled_shear","params":{...},"conservative":b}
// or {"family":"grid","resolution":N,"data":"<path to f32 binary, 2 channels>"}.
LiftMap map_from_config(const json& j, const std::string& base_dir = "");
LiftMap map_from_config_file(const std::string& path);

json verify_report_to_json(const LiftValidationReport& rep);
json probe_to_json(const StabilityProbe& probe);
json destabilize_to_json(const DestabilizeResult& res, const RationalVec2& vertex);
json deviation_summary_to_json(const DeviationReport& rep);

std::string birkhoff_csv(const std::vector<OrbitEstimate>& samples);
std::string deviation_trace_csv(const DeviationReport& rep);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

// Static SVG renderings: polygons in rotation-vector coordinates, or
// deviation traces against their bound.
std::string svg_polygons(const std::vector<std::pair<std::string, ConvexRationalPolygon>>& polys);
std::string svg_deviation_traces(
    const std::vector<std::pair<std::string, DeviationReport>>& traces);

}  // namespace rotaset
