#include "rotaset/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rotaset {

json polygon_to_json(const ConvexRationalPolygon& P) {
  json verts = json::array();
  json fverts = json::array();
  for (const RationalVec2& v : P.vertices()) {
    verts.push_back({{"x", to_string(v.x())}, {"y", to_string(v.y())}});
    fverts.push_back({to_double(v.x()), to_double(v.y())});
  }
  return json{{"vertices", verts}, {"float_vertices", fverts}};
}

ConvexRationalPolygon polygon_from_json(const json& j) {
  std::vector<RationalVec2> pts;
  for (const json& v : j.at("vertices")) {
    RationalVec2 p;
    p << rational_from_string(v.at("x").get<std::string>()),
        rational_from_string(v.at("y").get<std::string>());
    pts.push_back(p);
  }
  return ConvexRationalPolygon::hull(pts);
}

json pseudo_polygon_to_json(const PseudoRotationPolygon& P, GraphMode mode, double delta,
                            int grid) {
  json j = polygon_to_json(P.polygon);
  j["mode"] = (mode == GraphMode::inner) ? "inner" : "outer";
  j["delta"] = delta;
  j["grid"] = grid;
  j["certified"] = P.certified;
  j["support_queries"] = P.support_queries;
  return j;
}

LiftMap map_from_config(const json& j, const std::string& base_dir) {
  std::string family = j.at("family").get<std::string>();
  json params = j.value("params", json::object());
  LiftMap map = [&]() {
    if (family == "translation")
      return LiftMap::translation(
          Vector2d(params.value("a", 0.0), params.value("b", 0.0)));
    if (family == "shear") return LiftMap::shear(params.value("r", 0.3));
    if (family == "coupled_shear")
      return LiftMap::coupled_shear(params.value("a", 0.0), params.value("b", 0.0),
                                    params.value("r", 0.3), params.value("s", 0.2));
    if (family == "pinned") {
      int q = params.value("q", 2);
      int p1 = params.value("p1", 1);
      return LiftMap::pinned(q, p1, params.value("stir", 0.15 / q), params.value("stir2", 0.15),
                             params.value("contraction", 0.075));
    }
    if (family == "grid") {
      int n = j.at("resolution").get<int>();
      std::string path = j.at("data").get<std::string>();
      if (!base_dir.empty() && path.front() != '/') path = base_dir + "/" + path;
      std::ifstream in(path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open grid data '" + path + "'");
      std::vector<float> data(static_cast<std::size_t>(n) * n * 2);
      in.read(reinterpret_cast<char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(float)));
      if (in.gcount() != static_cast<std::streamsize>(data.size() * sizeof(float)))
        throw std::runtime_error("grid data '" + path + "' truncated");
      return LiftMap::grid_field(n, std::move(data));
    }
    throw std::invalid_argument("unknown map family '" + family + "'");
  }();
  if (j.contains("conservative")) map = map.with_conservative_flag(j.at("conservative").get<bool>());
  return map;
}

LiftMap map_from_config_file(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string dir = (slash == std::string::npos) ? std::string(".") : path.substr(0, slash);
  return map_from_config(read_json_file(path), dir);
}

json verify_report_to_json(const LiftValidationReport& rep) {
  return json{{"structural_ok", rep.structural_ok},
              {"periodicity_defect", rep.periodicity_defect},
              {"min_image_separation", rep.min_image_separation},
              {"injectivity_suspect", rep.injectivity_suspect},
              {"collision_witness",
               {{rep.collision_witness_a.x(), rep.collision_witness_a.y()},
                {rep.collision_witness_b.x(), rep.collision_witness_b.y()}}},
              {"boundary_winding", rep.boundary_winding},
              {"degree_one", rep.degree_one},
              {"conservative_checked", rep.conservative_checked},
              {"area_defect", rep.area_defect},
              {"conservative_claim_plausible", rep.conservative_claim_plausible},
              {"osc_grid", rep.osc_grid},
              {"all_ok", rep.all_ok()}};
}

namespace {

const char* verdict_name(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::evidence_stable:
      return "evidence-stable";
    case StabilityVerdict::unstable:
      return "unstable";
    default:
      return "inconclusive";
  }
}

}  // namespace

json probe_to_json(const StabilityProbe& probe) {
  json j;
  j["verdict"] = verdict_name(probe.verdict);
  j["reason"] = probe.reason;
  j["delta"] = probe.delta;
  j["grid"] = probe.grid;
  j["tolerance"] = probe.tolerance;
  j["denominator_bound"] = probe.denominator_bound;
  j["inner"] = pseudo_polygon_to_json(probe.inner, GraphMode::inner, probe.delta / 2, probe.grid);
  j["outer"] = pseudo_polygon_to_json(probe.outer, GraphMode::outer, probe.delta / 2, probe.grid);
  j["orbit_hull"] = polygon_to_json(probe.orbit.hull);
  j["orbit_error_radius"] = probe.orbit.error_radius;
  j["consensus"] = polygon_to_json(probe.consensus);
  j["consensus_ok"] = probe.consensus_ok;
  j["hausdorff_inner_outer"] = probe.hausdorff_inner_outer;
  j["hausdorff_outer_orbit"] = probe.hausdorff_outer_orbit;
  return j;
}

json destabilize_to_json(const DestabilizeResult& res, const RationalVec2& vertex) {
  json orbit = json::array();
  for (const Vector2d& p : res.certified_orbit.points) orbit.push_back({p.x(), p.y()});
  return json{{"vertex", to_string(vertex.x()) + "," + to_string(vertex.y())},
              {"k", res.k},
              {"u0", {res.u0.x(), res.u0.y()}},
              {"v0", to_string(res.v0.x()) + "," + to_string(res.v0.y())},
              {"v1", to_string(res.v1.x()) + "," + to_string(res.v1.y())},
              {"chosen", res.chosen},
              {"new_vector", to_string(res.new_vector.x()) + "," + to_string(res.new_vector.y())},
              {"perturbation_size", res.perturbation_size},
              {"budget", res.budget},
              {"winding", {res.winding.x(), res.winding.y()}},
              {"orbit_residual", res.orbit_residual},
              {"certified_orbit", orbit}};
}

json deviation_summary_to_json(const DeviationReport& rep) {
  return json{{"n_max", rep.n_max},
              {"max_deviation", rep.max_deviation},
              {"argmax_n", rep.argmax_n},
              {"bound_C", rep.bound_C},
              {"kind", rep.kind == DeviationKind::orbit ? "orbit" : "pseudo"},
              {"violated", rep.violated},
              {"first_violation_n", rep.first_violation_n}};
}

std::string birkhoff_csv(const std::vector<OrbitEstimate>& samples) {
  std::ostringstream out;
  out << "z0x,z0y,n,vx,vy,err_radius\n";
  out.precision(17);
  for (const OrbitEstimate& s : samples)
    out << s.base.x() << ',' << s.base.y() << ',' << s.length << ',' << s.vector.x() << ','
        << s.vector.y() << ',' << s.error_radius << '\n';
  return out.str();
}

std::string deviation_trace_csv(const DeviationReport& rep) {
  std::ostringstream out;
  out << "n,dev,bound_C\n";
  out.precision(17);
  for (const auto& [n, dev] : rep.trace) out << n << ',' << dev << ',' << rep.bound_C << '\n';
  return out.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

namespace {

struct Box {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  void include(double x, double y) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

}  // namespace

std::string svg_polygons(const std::vector<std::pair<std::string, ConvexRationalPolygon>>& polys) {
  Box box;
  bool first = true;
  for (const auto& [name, poly] : polys)
    for (const RationalVec2& v : poly.vertices()) {
      double x = to_double(v.x()), y = to_double(v.y());
      if (first) {
        box = Box{x, y, x, y};
        first = false;
      } else {
        box.include(x, y);
      }
    }
  double spanx = std::max(box.x1 - box.x0, 1e-6), spany = std::max(box.y1 - box.y0, 1e-6);
  double pad = 0.12 * std::max(spanx, spany);
  box.x0 -= pad;
  box.y0 -= pad;
  box.x1 += pad;
  box.y1 += pad;
  const int W = 640, H = 640, M = 48;
  auto px = [&](double x) { return M + (x - box.x0) / (box.x1 - box.x0) * (W - 2 * M); };
  auto py = [&](double y) { return H - M - (y - box.y0) / (box.y1 - box.y0) * (H - 2 * M); };

  std::ostringstream svg;
  svg.precision(8);
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  // axes with ticks in rotation-vector coordinates
  svg << "<line x1='" << M << "' y1='" << H - M << "' x2='" << W - M << "' y2='" << H - M
      << "' stroke='black'/>\n";
  svg << "<line x1='" << M << "' y1='" << M << "' x2='" << M << "' y2='" << H - M
      << "' stroke='black'/>\n";
  for (int t = 0; t <= 4; ++t) {
    double x = box.x0 + (box.x1 - box.x0) * t / 4.0;
    double y = box.y0 + (box.y1 - box.y0) * t / 4.0;
    svg << "<text x='" << px(x) << "' y='" << H - M + 18 << "' font-size='11' text-anchor='middle'>"
        << x << "</text>\n";
    svg << "<text x='" << M - 6 << "' y='" << py(y) + 4 << "' font-size='11' text-anchor='end'>"
        << y << "</text>\n";
  }
  int ci = 0;
  for (const auto& [name, poly] : polys) {
    const char* color = kPalette[ci % 6];
    std::ostringstream path;
    if (poly.size() == 1) {
      Vector2d v = to_double(poly.vertex(0));
      svg << "<circle cx='" << px(v.x()) << "' cy='" << py(v.y()) << "' r='4' fill='" << color
          << "'/>\n";
    } else {
      path << "M ";
      for (std::size_t i = 0; i < poly.size(); ++i) {
        Vector2d v = to_double(poly.vertex(i));
        path << px(v.x()) << ' ' << py(v.y()) << (i + 1 < poly.size() ? " L " : " Z");
      }
      svg << "<path d='" << path.str() << "' fill='" << color << "' fill-opacity='0.15' stroke='"
          << color << "' stroke-width='1.5'/>\n";
    }
    svg << "<text x='" << W - M - 4 << "' y='" << M + 16 * (ci + 1)
        << "' font-size='12' text-anchor='end' fill='" << color << "'>" << name << "</text>\n";
    ++ci;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_deviation_traces(
    const std::vector<std::pair<std::string, DeviationReport>>& traces) {
  double nmax = 1, dmax = 1e-12;
  for (const auto& [name, rep] : traces) {
    nmax = std::max(nmax, static_cast<double>(rep.n_max));
    for (const auto& [n, dev] : rep.trace) dmax = std::max(dmax, dev);
    dmax = std::max(dmax, rep.bound_C);
  }
  const int W = 720, H = 480, M = 56;
  auto px = [&](double n) { return M + std::log10(std::max(n, 1.0)) / std::log10(nmax) * (W - 2 * M); };
  auto py = [&](double d) { return H - M - d / (1.1 * dmax) * (H - 2 * M); };
  std::ostringstream svg;
  svg.precision(8);
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<line x1='" << M << "' y1='" << H - M << "' x2='" << W - M << "' y2='" << H - M
      << "' stroke='black'/>\n<line x1='" << M << "' y1='" << M << "' x2='" << M << "' y2='"
      << H - M << "' stroke='black'/>\n";
  svg << "<text x='" << W / 2 << "' y='" << H - 12 << "' font-size='12' text-anchor='middle'>n"
      << " (log)</text>\n";
  svg << "<text x='14' y='" << H / 2 << "' font-size='12' transform='rotate(-90 14 " << H / 2
      << ")' text-anchor='middle'>deviation</text>\n";
  int ci = 0;
  for (const auto& [name, rep] : traces) {
    const char* color = kPalette[ci % 6];
    std::ostringstream path;
    bool first = true;
    for (const auto& [n, dev] : rep.trace) {
      path << (first ? "M " : "L ") << px(static_cast<double>(n)) << ' ' << py(dev) << ' ';
      first = false;
    }
    svg << "<path d='" << path.str() << "' fill='none' stroke='" << color
        << "' stroke-width='1.5'/>\n";
    if (rep.bound_C > 0)
      svg << "<line x1='" << M << "' y1='" << py(rep.bound_C) << "' x2='" << W - M << "' y2='"
          << py(rep.bound_C) << "' stroke='" << color << "' stroke-dasharray='6 4'/>\n";
    svg << "<text x='" << W - M - 4 << "' y='" << M + 16 * (ci + 1)
        << "' font-size='12' text-anchor='end' fill='" << color << "'>" << name << "</text>\n";
    ++ci;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rotaset
