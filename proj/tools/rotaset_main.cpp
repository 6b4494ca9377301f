// rotaset: certified inner/outer approximation of rotation sets of torus
// homeomorphisms, constructive C0 destabilization, and deviation checks.

#include "rotaset/deviations.hpp"
#include "rotaset/estimation.hpp"
#include "rotaset/geometry.hpp"
#include "rotaset/io.hpp"
#include "rotaset/parallel.hpp"
#include "rotaset/perturbation.hpp"
#include "rotaset/torus_maps.hpp"
#include "rotaset/transition_graph.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <string>

namespace {

using namespace rotaset;

std::string iso_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&now));
  return buf;
}

json provenance(const json& params) {
  return json{{"tool", "rotaset"}, {"generated_at", iso_timestamp()}, {"parameters", params}};
}

RationalVec2 parse_vertex(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("vertex must be 'x,y'");
  RationalVec2 v;
  v << rational_from_string(s.substr(0, comma)), rational_from_string(s.substr(comma + 1));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotation sets of torus homeomorphisms: certified approximation toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int threads = 0;
  std::string norm_name = "euclidean";
  app.add_option("--seed", seed, "global random seed");
  app.add_option("--threads", threads, "worker pool size (default: available parallelism)");
  app.add_option("--norm", norm_name, "distance norm: euclidean|sup")
      ->check(CLI::IsMember({"euclidean", "sup"}));

  // pseudo-set
  auto* cmd_ps = app.add_subcommand("pseudo-set", "delta-pseudo-rotation polygon from the grid graph");
  std::string ps_map, ps_out, ps_mode = "outer", ps_edges;
  double ps_delta = 0.05;
  int ps_grid = 128;
  cmd_ps->add_option("--map", ps_map, "map config JSON")->required();
  cmd_ps->add_option("--delta", ps_delta, "pseudo-orbit tolerance")->required();
  cmd_ps->add_option("--grid", ps_grid, "grid resolution N (h = 1/N)");
  cmd_ps->add_option("--mode", ps_mode, "inner|outer")->check(CLI::IsMember({"inner", "outer"}));
  cmd_ps->add_option("-o,--output", ps_out, "polygon JSON output")->required();
  cmd_ps->add_option("--export-edges", ps_edges, "binary edge-list dump (diagnostics)");

  // orbit-hull
  auto* cmd_oh = app.add_subcommand("orbit-hull", "hull of Birkhoff vectors from sampled orbits");
  std::string oh_map, oh_out, oh_csv;
  int oh_samples = 64;
  long long oh_n = 100000;
  cmd_oh->add_option("--map", oh_map)->required();
  cmd_oh->add_option("-S,--samples", oh_samples, "stratified sample count");
  cmd_oh->add_option("-n,--length", oh_n, "orbit length");
  cmd_oh->add_option("-o,--output", oh_out, "hull JSON output")->required();
  cmd_oh->add_option("--csv", oh_csv, "Birkhoff sample CSV output");

  // lebesgue
  auto* cmd_lb = app.add_subcommand("lebesgue", "Lebesgue mean rotation vector by quadrature");
  std::string lb_map, lb_out;
  int lb_res = 256;
  cmd_lb->add_option("--map", lb_map)->required();
  cmd_lb->add_option("-M,--resolution", lb_res, "quadrature resolution");
  cmd_lb->add_option("-o,--output", lb_out)->required();

  // probe
  auto* cmd_pr = app.add_subcommand("probe", "stability probe at tolerance delta");
  std::string pr_map, pr_out;
  double pr_delta = 0.1;
  int pr_grid = 128;
  cmd_pr->add_option("--map", pr_map)->required();
  cmd_pr->add_option("--delta", pr_delta)->required();
  cmd_pr->add_option("--grid", pr_grid);
  cmd_pr->add_option("-o,--output", pr_out)->required();

  // perturb
  auto* cmd_pb = app.add_subcommand("perturb", "destabilizing C0 perturbation at a rational vertex");
  std::string pb_map, pb_poly, pb_vertex, pb_out;
  int pb_grid = 256;
  cmd_pb->add_option("--map", pb_map)->required();
  cmd_pb->add_option("--polygon", pb_poly, "rotation-set estimate JSON")->required();
  cmd_pb->add_option("--vertex", pb_vertex, "extremal vertex 'p1/q,p2/q'")->required();
  cmd_pb->add_option("--grid", pb_grid, "periodic-orbit search resolution");
  cmd_pb->add_option("-o,--output", pb_out)->required();

  // deviations
  auto* cmd_dv = app.add_subcommand("deviations", "rotational deviation trace against n*P");
  std::string dv_map, dv_poly, dv_mode = "none", dv_out, dv_summary, dv_dir = "1,0";
  double dv_delta = 0, dv_bound = 0, dv_osc = -1, dv_eps = 0;
  long long dv_n = 100000;
  std::string dv_kind = "pseudo";
  double dv_x0x = 0.1, dv_x0y = 0.1;
  cmd_dv->add_option("--map", dv_map)->required();
  cmd_dv->add_option("--polygon", dv_poly, "candidate rotation polygon JSON")->required();
  cmd_dv->add_option("--delta", dv_delta, "per-step noise budget (0 = true orbit)");
  cmd_dv->add_option("--mode", dv_mode, "none|uniform|boundary|locked")
      ->check(CLI::IsMember({"none", "uniform", "boundary", "locked"}));
  cmd_dv->add_option("--dir", dv_dir, "locked noise direction 'x,y'");
  cmd_dv->add_option("-n,--length", dv_n, "horizon n_max");
  cmd_dv->add_option("--bound", dv_bound, "explicit constant C (overrides --eps)");
  cmd_dv->add_option("--eps", dv_eps, "compute C = deviation_constant(osc, eps, kind)");
  cmd_dv->add_option("--osc", dv_osc, "osc value for the constant (default: measured)");
  cmd_dv->add_option("--kind", dv_kind, "orbit|pseudo (for the constant)")
      ->check(CLI::IsMember({"orbit", "pseudo"}));
  cmd_dv->add_option("--x0x", dv_x0x)->capture_default_str();
  cmd_dv->add_option("--x0y", dv_x0y)->capture_default_str();
  cmd_dv->add_option("-o,--output", dv_out, "trace CSV output")->required();
  cmd_dv->add_option("--summary", dv_summary, "summary JSON output");

  // plot
  auto* cmd_pl = app.add_subcommand("plot", "static SVG of polygons or deviation traces");
  std::vector<std::string> pl_inputs;
  std::string pl_out;
  cmd_pl->add_option("inputs", pl_inputs, "polygon JSONs or deviation CSV/JSON summaries")
      ->required();
  cmd_pl->add_option("-o,--output", pl_out, "SVG output")->required();

  // verify-map
  auto* cmd_vm = app.add_subcommand("verify-map", "structural checks of a lift config");
  std::string vm_map, vm_out;
  int vm_grid = 128;
  cmd_vm->add_option("--map", vm_map)->required();
  cmd_vm->add_option("--grid", vm_grid);
  cmd_vm->add_option("-o,--output", vm_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are exit 2, --help is 0
  }

  try {
    if (threads > 0) worker_threads() = threads;
    Norm norm = (norm_name == "sup") ? Norm::sup : Norm::euclidean;

    if (cmd_ps->parsed()) {
      LiftMap map = map_from_config_file(ps_map);
      GraphMode mode = (ps_mode == "inner") ? GraphMode::inner : GraphMode::outer;
      DisplacementGraph g = build_graph(map, ps_grid, ps_delta, mode, norm);
      if (!ps_edges.empty()) g.export_edges(ps_edges);
      PseudoRotationPolygon poly = pseudo_rotation_polygon(g);
      json out = pseudo_polygon_to_json(poly, mode, ps_delta, ps_grid);
      out["provenance"] = provenance({{"map", ps_map},
                                      {"delta", ps_delta},
                                      {"grid", ps_grid},
                                      {"mode", ps_mode},
                                      {"norm", norm_name},
                                      {"seed", seed}});
      write_json_file(ps_out, out);
    } else if (cmd_oh->parsed()) {
      LiftMap map = map_from_config_file(oh_map);
      OrbitHullEstimate est = orbit_hull_estimate(map, oh_samples, oh_n, seed);
      json out = polygon_to_json(est.hull);
      out["error_radius"] = est.error_radius;
      out["certified"] = false;  // finite-time inner estimate only
      out["provenance"] = provenance(
          {{"map", oh_map}, {"samples", oh_samples}, {"length", oh_n}, {"seed", seed}});
      write_json_file(oh_out, out);
      if (!oh_csv.empty()) write_text_file(oh_csv, birkhoff_csv(est.samples));
    } else if (cmd_lb->parsed()) {
      LiftMap map = map_from_config_file(lb_map);
      LebesgueVector lv = lebesgue_rotation_vector(map, lb_res);
      json out{{"value", {lv.value.x(), lv.value.y()}},
               {"error_bound", lv.error_bound},
               {"resolution", lv.resolution}};
      out["provenance"] = provenance({{"map", lb_map}, {"resolution", lb_res}});
      write_json_file(lb_out, out);
    } else if (cmd_pr->parsed()) {
      LiftMap map = map_from_config_file(pr_map);
      ProbeOptions opts;
      opts.seed = seed;
      StabilityProbe probe = probe_stability(map, pr_delta, pr_grid, opts);
      json out = probe_to_json(probe);
      out["provenance"] = provenance(
          {{"map", pr_map}, {"delta", pr_delta}, {"grid", pr_grid}, {"seed", seed}});
      write_json_file(pr_out, out);
    } else if (cmd_pb->parsed()) {
      LiftMap map = map_from_config_file(pb_map);
      ConvexRationalPolygon P = polygon_from_json(read_json_file(pb_poly));
      RationalVec2 vertex = parse_vertex(pb_vertex);
      DestabilizeResult res = destabilize(map, P, vertex, pb_grid);
      json out = destabilize_to_json(res, vertex);
      out["provenance"] = provenance({{"map", pb_map},
                                      {"polygon", pb_poly},
                                      {"vertex", pb_vertex},
                                      {"grid", pb_grid}});
      write_json_file(pb_out, out);
    } else if (cmd_dv->parsed()) {
      LiftMap map = map_from_config_file(dv_map);
      ConvexRationalPolygon P = polygon_from_json(read_json_file(dv_poly));
      DeviationOptions opts;
      opts.n_max = dv_n;
      opts.delta = dv_delta;
      opts.seed = seed;
      opts.norm = norm;
      if (dv_mode == "uniform")
        opts.mode = NoiseMode::uniform;
      else if (dv_mode == "boundary")
        opts.mode = NoiseMode::boundary_biased;
      else if (dv_mode == "locked")
        opts.mode = NoiseMode::direction_locked;
      if (opts.mode == NoiseMode::direction_locked) {
        auto comma = dv_dir.find(',');
        opts.locked_direction =
            Vector2d(std::stod(dv_dir.substr(0, comma)), std::stod(dv_dir.substr(comma + 1)));
      }
      if (dv_bound > 0) {
        opts.bound_C = dv_bound;
      } else if (dv_eps > 0) {
        double oscv = dv_osc >= 0 ? dv_osc : osc(map).certified_upper;
        opts.bound_C = deviation_constant(
            oscv, dv_eps, dv_kind == "orbit" ? DeviationKind::orbit : DeviationKind::pseudo);
      }
      DeviationReport rep = max_deviation(map, P, Vector2d(dv_x0x, dv_x0y), opts);
      write_text_file(dv_out, deviation_trace_csv(rep));
      if (!dv_summary.empty()) {
        json out = deviation_summary_to_json(rep);
        out["provenance"] = provenance({{"map", dv_map},
                                        {"polygon", dv_poly},
                                        {"delta", dv_delta},
                                        {"mode", dv_mode},
                                        {"n", dv_n},
                                        {"seed", seed}});
        write_json_file(dv_summary, out);
      }
    } else if (cmd_pl->parsed()) {
      std::vector<std::pair<std::string, ConvexRationalPolygon>> polys;
      for (const std::string& in : pl_inputs) {
        json j = read_json_file(in);
        if (j.contains("vertices")) polys.emplace_back(in, polygon_from_json(j));
      }
      if (polys.empty()) throw std::runtime_error("no polygon inputs recognized");
      write_text_file(pl_out, svg_polygons(polys));
    } else if (cmd_vm->parsed()) {
      LiftMap map = map_from_config_file(vm_map);
      LiftValidationReport rep = verify_lift(map, vm_grid);
      json out = verify_report_to_json(rep);
      out["provenance"] = provenance({{"map", vm_map}, {"grid", vm_grid}});
      write_json_file(vm_out, out);
    }
  } catch (const std::exception& e) {
    json err{{"error", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
