#pragma once

#include "rotaset/geometry.hpp"
#include "rotaset/torus_maps.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rotaset {

enum class GraphMode { inner, outer };

// Digraph on the N x N grid cells of the torus. An edge (u, v, w) with
// w in Z^2 says "cell u can delta-pseudo-jump to cell v with integer
// displacement w".
//
//   inner mode: d(f~(c_u), c_v + w) < delta at cell centres, so every path of
//   the graph IS a genuine delta-pseudo-orbit through centres.
//   outer mode: threshold delta + r_h + omega(r_h) with r_h = h*sqrt(2)/2, so
//   every genuine delta-pseudo-orbit of the map is traceable as a path.
class DisplacementGraph {
 public:
  int grid_n = 0;
  double delta = 0;
  GraphMode mode = GraphMode::inner;
  double threshold = 0;  // effective edge threshold
  double omega_rh = 0;   // omega(r_h) of the map used at build time
  Norm norm = Norm::euclidean;

  // CSR adjacency; node id = j * grid_n + i for cell (i, j).
  std::vector<std::uint64_t> offsets;
  std::vector<std::uint32_t> to;
  std::vector<std::int8_t> wx, wy;

  std::vector<std::int32_t> scc_index;  // Tarjan labels, reverse topological order
  std::int32_t scc_count = 0;
  std::vector<std::uint8_t> scc_nontrivial;  // per SCC id: carries at least one cycle
  bool nontrivial_sccs_form_chain = true;    // condensation order is total on them

  std::size_t node_count() const { return static_cast<std::size_t>(grid_n) * grid_n; }
  std::size_t edge_count() const { return to.size(); }
  double cell_radius() const { return std::sqrt(2.0) / (2.0 * grid_n); }
  Vector2d cell_center(std::uint32_t id) const {
    return {(id % grid_n + 0.5) / grid_n, (id / grid_n + 0.5) / grid_n};
  }
  bool has_cycle() const;

  // Diagnostic binary edge list: records of (u:u32, v:u32, wx:i8, wy:i8).
  void export_edges(const std::string& path) const;
};

// Deterministic in (map, grid_n, delta, mode). Throws "grid too coarse" when
// h > delta and on edge-label overflow.
DisplacementGraph build_graph(const LiftMap& map, int grid_n, double delta, GraphMode mode,
                              Norm norm = Norm::euclidean);

enum class MmcAlgorithm { automatic, karp, policy_iteration };

struct MaxMeanCycleResult {
  double value = 0;               // <mean_vector, direction> as a double
  Rational exact_value;           // exact, w.r.t. the integer direction used
  long long dir_x = 0, dir_y = 0; // the exact integer direction the query used
  RationalVec2 mean_vector;       // exact mean displacement of the cycle
  std::vector<std::uint32_t> cycle;  // attaining simple cycle (closed, first != last)
};

// Support oracle of the pseudo-rotation polygon: max over cycles of
// (sum <w, theta>) / length, taken over all strongly connected components.
// Real directions are normalized to an exact integer direction (dyadic
// rounding at ~2^-62 relative precision); cycle means and all comparisons are
// exact. Throws "no cycles" when the graph is acyclic.
MaxMeanCycleResult max_mean_cycle(const DisplacementGraph& g, const Vector2d& theta,
                                  MmcAlgorithm algo = MmcAlgorithm::automatic);
MaxMeanCycleResult max_mean_cycle_exact(const DisplacementGraph& g, long long tx, long long ty,
                                        MmcAlgorithm algo = MmcAlgorithm::automatic,
                                        std::vector<std::uint32_t>* warm_policy = nullptr);

// Exact mean displacement of a closed path; throws if the path is not closed
// or uses absent edges.
RationalVec2 cycle_mean_vector(const DisplacementGraph& g,
                               const std::vector<std::uint32_t>& cycle);

struct PseudoRotationPolygon {
  ConvexRationalPolygon polygon;
  bool certified = false;   // every hull edge confirmed by a support query
  int support_queries = 0;
  // attaining cycle for each polygon vertex, aligned with polygon.vertices()
  std::vector<std::vector<std::uint32_t>> vertex_cycles;
};

// Exact convex hull of the cycle-mean vectors, reconstructed by support-oracle
// refinement: query outer normals of the running hull, add attaining means,
// repeat to fixpoint. Vertices are exact rationals with denominator bounded by
// the SCC node count. A direction budget guards pathological inputs; hitting
// it downgrades the result to uncertified.
PseudoRotationPolygon pseudo_rotation_polygon(const DisplacementGraph& g,
                                              int direction_budget = 4096);

// Certificate for inner-mode polygon vertices: the attaining cycle routed
// through cell centres as an explicit pseudo-orbit (closing step included).
PseudoOrbit cycle_center_orbit(const DisplacementGraph& g,
                               const std::vector<std::uint32_t>& cycle);

}  // namespace rotaset
