#include "rotaset/transition_graph.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace rotaset {

namespace {

using i128 = __int128;

constexpr i128 kNegInf = (i128(1) << 126) * -1;

BigInt bigint_from_i128(i128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  BigInt r = static_cast<std::uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(u);
  return neg ? BigInt(-r) : r;
}

Rational rational_from_i128(i128 num, i128 den) {
  return Rational(bigint_from_i128(num), bigint_from_i128(den));
}

// Exact comparison of fractions a/b vs c/d with positive denominators.
int compare_frac(i128 a, i128 b, i128 c, i128 d) {
  i128 lhs = a * d, rhs = c * b;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

struct IntDir {
  long long x = 0, y = 0;
};

IntDir reduce_dir(long long x, long long y) {
  if (x == 0 && y == 0) throw std::invalid_argument("support direction must be nonzero");
  long long g = std::gcd(std::abs(x), std::abs(y));
  return {x / g, y / g};
}

// Dyadic normalization of a real direction to an exact integer direction;
// the dominant component is represented exactly, the other to 2^-62 relative
// precision. Scale does not matter for cycle-mean comparisons.
IntDir direction_to_ints(const Vector2d& theta) {
  double ax = std::abs(theta.x()), ay = std::abs(theta.y());
  if (!(ax > 0) && !(ay > 0)) throw std::invalid_argument("support direction must be nonzero");
  if (ax == 0) return {0, theta.y() > 0 ? 1 : -1};
  if (ay == 0) return {theta.x() > 0 ? 1 : -1, 0};
  int e = std::ilogb(std::max(ax, ay));
  int k = 61 - e;
  long long tx = std::llround(std::scalbn(theta.x(), k));
  long long ty = std::llround(std::scalbn(theta.y(), k));
  if (tx == 0 && ty == 0) throw std::invalid_argument("support direction must be nonzero");
  return reduce_dir(tx, ty);
}

// Iterative Tarjan SCC over the CSR arrays.
void tarjan_scc(const DisplacementGraph& g, std::vector<std::int32_t>& comp,
                std::int32_t& comp_count) {
  std::size_t n = g.node_count();
  comp.assign(n, -1);
  comp_count = 0;
  std::vector<std::int32_t> index(n, -1), lowlink(n, 0);
  std::vector<std::uint8_t> onstack(n, 0);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t node;
    std::uint64_t edge;
  };
  std::vector<Frame> call;
  std::int32_t next_index = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call.push_back({root, g.offsets[root]});
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    onstack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.edge < g.offsets[f.node + 1]) {
        std::uint32_t w = g.to[f.edge++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          onstack[w] = 1;
          call.push_back({w, g.offsets[w]});
        } else if (onstack[w]) {
          lowlink[f.node] = std::min(lowlink[f.node], index[w]);
        }
      } else {
        std::uint32_t v = f.node;
        call.pop_back();
        if (!call.empty())
          lowlink[call.back().node] = std::min(lowlink[call.back().node], lowlink[v]);
        if (lowlink[v] == index[v]) {
          while (true) {
            std::uint32_t w = stack.back();
            stack.pop_back();
            onstack[w] = 0;
            comp[w] = comp_count;
            if (w == v) break;
          }
          ++comp_count;
        }
      }
    }
  }
}

}  // namespace

bool DisplacementGraph::has_cycle() const {
  for (std::uint8_t f : scc_nontrivial)
    if (f) return true;
  return false;
}

void DisplacementGraph::export_edges(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  for (std::uint32_t u = 0; u < node_count(); ++u) {
    for (std::uint64_t e = offsets[u]; e < offsets[u + 1]; ++e) {
      std::uint32_t v = to[e];
      out.write(reinterpret_cast<const char*>(&u), 4);
      out.write(reinterpret_cast<const char*>(&v), 4);
      out.write(reinterpret_cast<const char*>(&wx[e]), 1);
      out.write(reinterpret_cast<const char*>(&wy[e]), 1);
    }
  }
}

DisplacementGraph build_graph(const LiftMap& map, int grid_n, double delta, GraphMode mode,
                              Norm norm) {
  if (grid_n < 2) throw std::invalid_argument("grid resolution must be >= 2");
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  double h = 1.0 / grid_n;
  if (h > delta) throw std::invalid_argument("grid too coarse: requires h <= delta");

  DisplacementGraph g;
  g.grid_n = grid_n;
  g.delta = delta;
  g.mode = mode;
  g.norm = norm;
  double r_h = (norm == Norm::euclidean) ? h * std::sqrt(2.0) / 2.0 : h / 2.0;
  g.omega_rh = map.omega(r_h);
  g.threshold = (mode == GraphMode::inner) ? delta : delta + r_h + g.omega_rh;

  std::size_t n = g.node_count();
  std::vector<Vector2d> image(n);
  for (std::uint32_t u = 0; u < n; ++u) image[u] = map.eval(g.cell_center(u));

  double T = g.threshold;
  int wbound = static_cast<int>(std::ceil(map.phi_sup_bound() + T)) + 2;
  if (wbound > 126)
    throw std::runtime_error("edge label overflow: displacement range too large for degree-1 map");

  auto in_range = [&](const Vector2d& d) {
    if (norm == Norm::euclidean) return d.squaredNorm() < T * T;
    return std::abs(d.x()) < T && std::abs(d.y()) < T;
  };

  // Pass 1: out-degrees; pass 2: fill. Enumeration order is fixed, so the
  // graph is deterministic in (map, grid, delta, mode).
  std::vector<std::uint64_t> degree(n, 0);
  auto scan = [&](auto&& emit) {
    for (std::uint32_t u = 0; u < n; ++u) {
      const Vector2d& F = image[u];
      int ax_lo = static_cast<int>(std::ceil((F.x() - T) * grid_n - 0.5));
      int ax_hi = static_cast<int>(std::floor((F.x() + T) * grid_n - 0.5));
      int ay_lo = static_cast<int>(std::ceil((F.y() - T) * grid_n - 0.5));
      int ay_hi = static_cast<int>(std::floor((F.y() + T) * grid_n - 0.5));
      for (int b = ay_lo; b <= ay_hi; ++b) {
        double zy = (b + 0.5) * h;
        for (int a = ax_lo; a <= ax_hi; ++a) {
          Vector2d z((a + 0.5) * h, zy);
          if (!in_range(z - F)) continue;
          int am = ((a % grid_n) + grid_n) % grid_n;
          int bm = ((b % grid_n) + grid_n) % grid_n;
          int wxv = (a - am) / grid_n;
          int wyv = (b - bm) / grid_n;
          if (std::abs(wxv) > wbound || std::abs(wyv) > wbound)
            throw std::runtime_error("edge label overflow: map evidently not degree-1");
          emit(u, static_cast<std::uint32_t>(bm) * grid_n + am, static_cast<std::int8_t>(wxv),
               static_cast<std::int8_t>(wyv));
        }
      }
    }
  };
  scan([&](std::uint32_t u, std::uint32_t, std::int8_t, std::int8_t) { ++degree[u]; });

  g.offsets.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) g.offsets[u + 1] = g.offsets[u] + degree[u];
  std::size_t m = g.offsets[n];
  g.to.resize(m);
  g.wx.resize(m);
  g.wy.resize(m);
  std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  scan([&](std::uint32_t u, std::uint32_t v, std::int8_t wxv, std::int8_t wyv) {
    std::uint64_t e = cursor[u]++;
    g.to[e] = v;
    g.wx[e] = wxv;
    g.wy[e] = wyv;
  });

  tarjan_scc(g, g.scc_index, g.scc_count);

  // A component is nontrivial exactly when it carries a cycle.
  std::vector<std::uint32_t> scc_size(g.scc_count, 0);
  for (std::size_t u = 0; u < n; ++u) ++scc_size[g.scc_index[u]];
  g.scc_nontrivial.assign(g.scc_count, 0);
  for (std::int32_t c = 0; c < g.scc_count; ++c)
    if (scc_size[c] >= 2) g.scc_nontrivial[c] = 1;
  for (std::uint32_t u = 0; u < n; ++u) {
    if (g.scc_nontrivial[g.scc_index[u]]) continue;
    for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e)
      if (g.to[e] == u) {
        g.scc_nontrivial[g.scc_index[u]] = 1;
        break;
      }
  }

  // Tarjan ids come out in reverse topological order (edges go from higher to
  // lower id), so the nontrivial components form a chain iff each one reaches
  // the next lower one. The pseudo-rotation polygon hulls all components
  // jointly; the flag records whether that hull is exact for the limit
  // definition or an over-approximation across incomparable components.
  std::vector<std::int32_t> nontrivial_ids;
  for (std::int32_t c = g.scc_count - 1; c >= 0; --c)
    if (g.scc_nontrivial[c]) nontrivial_ids.push_back(c);
  g.nontrivial_sccs_form_chain = true;
  if (nontrivial_ids.size() > 1) {
    if (nontrivial_ids.size() > 17) {
      g.nontrivial_sccs_form_chain = false;  // give up rather than run many BFS passes
    } else {
      std::vector<std::uint8_t> seen(n);
      std::vector<std::uint32_t> queue;
      for (std::size_t k = 0; k + 1 < nontrivial_ids.size() && g.nontrivial_sccs_form_chain;
           ++k) {
        std::fill(seen.begin(), seen.end(), 0);
        queue.clear();
        for (std::uint32_t u = 0; u < n; ++u)
          if (g.scc_index[u] == nontrivial_ids[k]) {
            seen[u] = 1;
            queue.push_back(u);
          }
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
          std::uint32_t u = queue[qi];
          for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
            std::uint32_t v = g.to[e];
            if (!seen[v]) {
              seen[v] = 1;
              queue.push_back(v);
            }
          }
        }
        bool reached = false;
        for (std::uint32_t u = 0; u < n && !reached; ++u)
          if (seen[u] && g.scc_index[u] == nontrivial_ids[k + 1]) reached = true;
        if (!reached) g.nontrivial_sccs_form_chain = false;
      }
    }
  }
  return g;
}

namespace {

struct OracleResult {
  i128 num = kNegInf;  // cycle weight sum w.r.t. the integer direction
  long long den = 1;   // cycle length
  std::vector<std::uint32_t> cycle;
  long long sum_wx = 0, sum_wy = 0;
};

// ---------------------------------------------------------------------------
// Karp's algorithm on one strongly connected component, exact integer
// arithmetic throughout, followed by a tight-edge walk that extracts an
// attaining cycle from the lambda-shifted longest-path potentials.
// ---------------------------------------------------------------------------
OracleResult karp_component(const DisplacementGraph& g, const std::vector<std::uint32_t>& nodes,
                            long long tx, long long ty) {
  std::size_t ns = nodes.size();
  std::vector<std::int32_t> local(g.node_count(), -1);
  for (std::size_t i = 0; i < ns; ++i) local[nodes[i]] = static_cast<std::int32_t>(i);

  // Local CSR of intra-component edges.
  std::vector<std::uint32_t> eto;
  std::vector<i128> ew;
  std::vector<std::size_t> eoff(ns + 1, 0);
  for (std::size_t i = 0; i < ns; ++i) {
    std::uint32_t u = nodes[i];
    for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e)
      if (local[g.to[e]] >= 0) ++eoff[i + 1];
  }
  for (std::size_t i = 0; i < ns; ++i) eoff[i + 1] += eoff[i];
  eto.resize(eoff[ns]);
  ew.resize(eoff[ns]);
  std::vector<std::pair<std::int8_t, std::int8_t>> ewvec(eoff[ns]);
  {
    std::vector<std::size_t> cur(eoff.begin(), eoff.end() - 1);
    for (std::size_t i = 0; i < ns; ++i) {
      std::uint32_t u = nodes[i];
      for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
        std::int32_t lv = local[g.to[e]];
        if (lv < 0) continue;
        std::size_t slot = cur[i]++;
        eto[slot] = static_cast<std::uint32_t>(lv);
        ew[slot] = i128(g.wx[e]) * tx + i128(g.wy[e]) * ty;
        ewvec[slot] = {g.wx[e], g.wy[e]};
      }
    }
  }

  auto sweep = [&](const std::vector<i128>& d, std::vector<i128>& dn) {
    std::fill(dn.begin(), dn.end(), kNegInf);
    for (std::size_t u = 0; u < ns; ++u) {
      if (d[u] == kNegInf) continue;
      for (std::size_t e = eoff[u]; e < eoff[u + 1]; ++e) {
        i128 cand = d[u] + ew[e];
        if (cand > dn[eto[e]]) dn[eto[e]] = cand;
      }
    }
  };

  // Pass A: d_n from the source (any node; the component is strongly
  // connected). Pass B: re-stream d_k keeping the per-node minimum of
  // (d_n - d_k)/(n - k) and take the maximum over nodes.
  std::vector<i128> d(ns, kNegInf), dn(ns);
  d[0] = 0;
  std::vector<i128> dfinal;
  for (std::size_t k = 0; k < ns; ++k) {
    sweep(d, dn);
    d.swap(dn);
  }
  dfinal = d;

  std::vector<i128> best_num(ns, 0);
  std::vector<long long> best_den(ns, 0);  // 0 marks "no finite d_k seen yet"
  d.assign(ns, kNegInf);
  d[0] = 0;
  for (std::size_t k = 0; k < ns; ++k) {
    for (std::size_t v = 0; v < ns; ++v) {
      if (d[v] == kNegInf || dfinal[v] == kNegInf) continue;
      i128 num = dfinal[v] - d[v];
      long long den = static_cast<long long>(ns - k);
      if (best_den[v] == 0 || compare_frac(num, den, best_num[v], best_den[v]) < 0) {
        best_num[v] = num;
        best_den[v] = den;
      }
    }
    sweep(d, dn);
    d.swap(dn);
  }

  OracleResult res;
  for (std::size_t v = 0; v < ns; ++v) {
    if (best_den[v] == 0) continue;
    if (res.num == kNegInf ||
        compare_frac(best_num[v], best_den[v], res.num, res.den) > 0) {
      res.num = best_num[v];
      res.den = best_den[v];
    }
  }
  if (res.num == kNegInf) throw std::logic_error("karp: component carries no cycle");

  // Extraction: with weights q*w - p the maximum cycle mean is zero. Longest
  // paths from the source converge; around a critical cycle the relaxation
  // slacks telescope to zero, so all its edges are tight and a DFS over tight
  // edges must close a cycle.
  i128 p = res.num;
  i128 q = res.den;
  std::vector<i128> pot(ns, kNegInf);
  pot[0] = 0;
  for (std::size_t rounds = 0; rounds <= ns; ++rounds) {
    bool changed = false;
    for (std::size_t u = 0; u < ns; ++u) {
      if (pot[u] == kNegInf) continue;
      for (std::size_t e = eoff[u]; e < eoff[u + 1]; ++e) {
        i128 cand = pot[u] + q * ew[e] - p;
        if (cand > pot[eto[e]]) {
          pot[eto[e]] = cand;
          changed = true;
        }
      }
    }
    if (!changed) break;
    if (rounds == ns) throw std::logic_error("karp: positive cycle after lambda shift");
  }

  std::vector<std::int8_t> color(ns, 0);
  std::vector<std::uint32_t> path;
  std::vector<std::size_t> eiter(ns, 0);
  std::vector<std::int32_t> pos(ns, -1);
  for (std::size_t start = 0; start < ns && res.cycle.empty(); ++start) {
    if (color[start] != 0 || pot[start] == kNegInf) continue;
    path.clear();
    path.push_back(static_cast<std::uint32_t>(start));
    pos[start] = 0;
    color[start] = 1;
    eiter[start] = eoff[start];
    while (!path.empty() && res.cycle.empty()) {
      std::uint32_t u = path.back();
      bool advanced = false;
      for (std::size_t& e = eiter[u]; e < eoff[u + 1]; ++e) {
        std::uint32_t v = eto[e];
        if (pot[v] == kNegInf || pot[u] + q * ew[e] - p != pot[v]) continue;
        if (color[v] == 1) {
          // tight cycle: path suffix from v
          for (std::size_t i = pos[v]; i < path.size(); ++i)
            res.cycle.push_back(nodes[path[i]]);
          advanced = true;
          break;
        }
        if (color[v] == 0) {
          color[v] = 1;
          pos[v] = static_cast<std::int32_t>(path.size());
          path.push_back(v);
          eiter[v] = eoff[v];
          ++e;
          advanced = true;
          break;
        }
      }
      if (res.cycle.empty() && !advanced) {
        color[u] = 2;
        pos[u] = -1;
        path.pop_back();
      }
    }
    for (std::uint32_t v : path) {
      color[v] = 2;
      pos[v] = -1;
    }
  }
  if (res.cycle.empty()) throw std::logic_error("karp: no tight cycle found");

  // Exact means of the extracted cycle; they must reproduce lambda.
  i128 wsum = 0;
  for (std::size_t i = 0; i < res.cycle.size(); ++i) {
    std::uint32_t u = res.cycle[i];
    std::uint32_t v = res.cycle[(i + 1) % res.cycle.size()];
    std::size_t lu = local[u];
    bool found = false;
    for (std::size_t e = eoff[lu]; e < eoff[lu + 1]; ++e) {
      if (nodes[eto[e]] == v && pot[eto[e]] != kNegInf &&
          pot[lu] + q * ew[e] - p == pot[eto[e]]) {
        wsum += ew[e];
        res.sum_wx += ewvec[e].first;
        res.sum_wy += ewvec[e].second;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("karp: extracted cycle uses a non-tight edge");
  }
  if (compare_frac(wsum, static_cast<long long>(res.cycle.size()), res.num, res.den) != 0)
    throw std::logic_error("karp: extracted cycle does not attain the optimum");
  res.num = wsum;
  res.den = static_cast<long long>(res.cycle.size());
  return res;
}

// ---------------------------------------------------------------------------
// Multichain policy iteration (Howard) over all cycle-carrying components at
// once. Gains and biases are exact: gains are fractions (i128, int64), biases
// are kept scaled by the gain denominator of their component. Termination
// certifies optimality: at a fixed point no edge increases the gain, and
// around any cycle the bias slacks telescope, bounding every cycle mean by
// the best gain.
// ---------------------------------------------------------------------------
class PolicySolver {
 public:
  PolicySolver(const DisplacementGraph& g, long long tx, long long ty)
      : g_(g), tx_(tx), ty_(ty), n_(g.node_count()) {
    core_.assign(n_, 0);
    for (std::size_t u = 0; u < n_; ++u)
      if (g_.scc_nontrivial[g_.scc_index[u]]) core_[u] = 1;
    w_.resize(g_.edge_count());
    for (std::size_t e = 0; e < g_.edge_count(); ++e)
      w_[e] = i128(g_.wx[e]) * tx + i128(g_.wy[e]) * ty;
  }

  OracleResult solve(std::vector<std::uint32_t>* warm_policy) {
    policy_.assign(n_, kNoEdge);
    bool warm_ok = warm_policy && warm_policy->size() == n_;
    for (std::size_t u = 0; u < n_; ++u) {
      if (!core_[u]) continue;
      if (warm_ok) {
        std::uint32_t e = (*warm_policy)[u];
        if (e >= g_.offsets[u] && e < g_.offsets[u + 1] && core_[g_.to[e]]) {
          policy_[u] = e;
          continue;
        }
      }
      std::uint32_t best = kNoEdge;
      for (std::uint64_t e = g_.offsets[u]; e < g_.offsets[u + 1]; ++e) {
        if (!core_[g_.to[e]]) continue;
        if (best == kNoEdge || w_[e] > w_[best]) best = static_cast<std::uint32_t>(e);
      }
      if (best == kNoEdge) throw std::logic_error("core node without core out-edge");
      policy_[u] = best;
    }

    comp_.assign(n_, -1);
    bias_.assign(n_, 0);
    const int cap = 100000;
    int it = 0;
    for (; it < cap; ++it) {
      evaluate();
      if (!improve()) break;
    }
    if (it >= cap) throw std::runtime_error("policy iteration exceeded iteration cap");
    if (warm_policy) *warm_policy = policy_;

    std::int32_t best = -1;
    for (std::int32_t c = 0; c < static_cast<std::int32_t>(eta_num_.size()); ++c)
      if (best < 0 || compare_frac(eta_num_[c], eta_den_[c], eta_num_[best], eta_den_[best]) > 0)
        best = c;
    if (best < 0) throw std::runtime_error("no cycles: empty pseudo-rotation set at this resolution");

    OracleResult res;
    std::uint32_t root = comp_root_[best];
    std::uint32_t cur = root;
    i128 wsum = 0;
    do {
      res.cycle.push_back(cur);
      std::uint32_t e = policy_[cur];
      wsum += w_[e];
      res.sum_wx += g_.wx[e];
      res.sum_wy += g_.wy[e];
      cur = g_.to[e];
    } while (cur != root);
    res.num = wsum;
    res.den = static_cast<long long>(res.cycle.size());
    if (compare_frac(res.num, res.den, eta_num_[best], eta_den_[best]) != 0)
      throw std::logic_error("policy cycle does not attain its gain");
    return res;
  }

 private:
  static constexpr std::uint32_t kNoEdge = 0xffffffffu;

  void evaluate() {
    std::fill(comp_.begin(), comp_.end(), -1);
    eta_num_.clear();
    eta_den_.clear();
    comp_root_.clear();
    std::vector<std::uint32_t>& stack = scratch_;
    stack.clear();
    // colors: -1 untouched, -2 on current walk (position stored separately)
    std::vector<std::int32_t>& pos = pos_;
    pos.assign(n_, -1);
    for (std::uint32_t s = 0; s < n_; ++s) {
      if (!core_[s] || comp_[s] != -1) continue;
      stack.clear();
      std::uint32_t cur = s;
      while (true) {
        pos[cur] = static_cast<std::int32_t>(stack.size());
        stack.push_back(cur);
        std::uint32_t nxt = g_.to[policy_[cur]];
        if (comp_[nxt] != -1) {
          attach_tree(stack, 0, comp_[nxt]);
          break;
        }
        if (pos[nxt] != -1) {
          make_component(stack, static_cast<std::size_t>(pos[nxt]));
          break;
        }
        cur = nxt;
      }
      for (std::uint32_t v : stack) pos[v] = -1;
    }
  }

  void make_component(const std::vector<std::uint32_t>& stack, std::size_t cycle_from) {
    std::int32_t cid = static_cast<std::int32_t>(eta_num_.size());
    i128 wsum = 0;
    long long len = 0;
    std::uint32_t root = stack[cycle_from];
    for (std::size_t i = cycle_from; i < stack.size(); ++i) {
      wsum += w_[policy_[stack[i]]];
      ++len;
      if (stack[i] < root) root = stack[i];
    }
    eta_num_.push_back(wsum);
    eta_den_.push_back(len);
    comp_root_.push_back(root);
    // Bias around the cycle: H(root) = 0 and H(u) = q*w - p + H(pi(u)), which
    // propagates backward; walking forward uses H(next) = H(u) - (q*w - p).
    i128 p = wsum, q = len;
    std::uint32_t cur = root;
    i128 h = 0;
    do {
      comp_[cur] = cid;
      bias_[cur] = h;
      std::uint32_t e = policy_[cur];
      h = h - (q * w_[e] - p);
      cur = g_.to[e];
    } while (cur != root);
    // Tree part of the stack hangs below cycle_from.
    attach_tree(stack, 0, cid, cycle_from);
  }

  void attach_tree(const std::vector<std::uint32_t>& stack, std::size_t from, std::int32_t cid,
                   std::size_t end = SIZE_MAX) {
    std::size_t stop = std::min(end, stack.size());
    i128 p = eta_num_[cid], q = eta_den_[cid];
    for (std::size_t i = stop; i-- > from;) {
      std::uint32_t u = stack[i];
      if (comp_[u] != -1) continue;
      std::uint32_t e = policy_[u];
      std::uint32_t v = g_.to[e];
      comp_[u] = cid;
      bias_[u] = q * w_[e] - p + bias_[v];
    }
  }

  bool improve() {
    bool changed = false;
    for (std::uint32_t u = 0; u < n_; ++u) {
      if (!core_[u]) continue;
      std::int32_t cu = comp_[u];
      i128 nu = eta_num_[cu];
      i128 du = eta_den_[cu];
      std::uint32_t best_gain_edge = kNoEdge;
      std::int32_t best_gain_comp = -1;
      std::uint32_t bias_edge = kNoEdge;  // first strictly improving bias switch
      for (std::uint64_t e = g_.offsets[u]; e < g_.offsets[u + 1]; ++e) {
        std::uint32_t v = g_.to[e];
        if (!core_[v]) continue;
        std::int32_t cv = comp_[v];
        if (cv == cu) {
          // same gain by construction; bias test with common denominator
          if (bias_edge == kNoEdge && du * w_[e] + bias_[v] - nu > bias_[u])
            bias_edge = static_cast<std::uint32_t>(e);
          continue;
        }
        int cmp = compare_frac(eta_num_[cv], eta_den_[cv], nu, du);
        if (cmp > 0) {
          if (best_gain_edge == kNoEdge ||
              compare_frac(eta_num_[cv], eta_den_[cv], eta_num_[best_gain_comp],
                           eta_den_[best_gain_comp]) > 0) {
            best_gain_edge = static_cast<std::uint32_t>(e);
            best_gain_comp = cv;
          }
        } else if (cmp == 0 && bias_edge == kNoEdge) {
          // equal gain, different component: w + h(v) - g > h(u), scaled du*dv
          i128 dv = eta_den_[cv];
          i128 lhs = dv * (du * w_[e] - nu) + du * bias_[v];
          if (lhs > dv * bias_[u]) bias_edge = static_cast<std::uint32_t>(e);
        }
      }
      if (best_gain_edge != kNoEdge) {
        policy_[u] = best_gain_edge;
        changed = true;
      } else if (bias_edge != kNoEdge) {
        policy_[u] = bias_edge;
        changed = true;
      }
    }
    return changed;
  }

  const DisplacementGraph& g_;
  long long tx_, ty_;
  std::size_t n_;
  std::vector<std::uint8_t> core_;
  std::vector<i128> w_;
  std::vector<std::uint32_t> policy_;
  std::vector<std::int32_t> comp_;
  std::vector<i128> bias_;
  std::vector<i128> eta_num_;
  std::vector<i128> eta_den_;
  std::vector<std::uint32_t> comp_root_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::int32_t> pos_;
};

OracleResult run_oracle(const DisplacementGraph& g, long long tx, long long ty,
                        MmcAlgorithm algo, std::vector<std::uint32_t>* warm_policy) {
  if (!g.has_cycle())
    throw std::runtime_error("no cycles: empty pseudo-rotation set at this resolution");

  if (algo == MmcAlgorithm::automatic) {
    // Karp is O(n*m) per component; use it only when that stays small.
    std::vector<std::uint64_t> comp_nodes(g.scc_count, 0), comp_edges(g.scc_count, 0);
    for (std::uint32_t u = 0; u < g.node_count(); ++u) {
      std::int32_t c = g.scc_index[u];
      if (!g.scc_nontrivial[c]) continue;
      ++comp_nodes[c];
      for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e)
        if (g.scc_index[g.to[e]] == c) ++comp_edges[c];
    }
    std::uint64_t work = 0;
    for (std::int32_t c = 0; c < g.scc_count; ++c)
      if (g.scc_nontrivial[c]) work += (comp_nodes[c] + 2) * comp_edges[c];
    algo = (work <= 30'000'000ull) ? MmcAlgorithm::karp : MmcAlgorithm::policy_iteration;
  }

  if (algo == MmcAlgorithm::policy_iteration) {
    PolicySolver solver(g, tx, ty);
    return solver.solve(warm_policy);
  }

  // Karp per strongly connected component, best over components.
  std::vector<std::vector<std::uint32_t>> groups(g.scc_count);
  for (std::uint32_t u = 0; u < g.node_count(); ++u)
    if (g.scc_nontrivial[g.scc_index[u]]) groups[g.scc_index[u]].push_back(u);
  OracleResult best;
  for (std::int32_t c = 0; c < g.scc_count; ++c) {
    if (groups[c].empty()) continue;
    OracleResult r = karp_component(g, groups[c], tx, ty);
    if (best.num == kNegInf || compare_frac(r.num, r.den, best.num, best.den) > 0) best = r;
  }
  return best;
}

MaxMeanCycleResult finish_result(const OracleResult& o, long long tx, long long ty,
                                 const Vector2d& theta) {
  MaxMeanCycleResult r;
  r.dir_x = tx;
  r.dir_y = ty;
  r.exact_value = rational_from_i128(o.num, o.den);
  r.mean_vector.x() = Rational(BigInt(o.sum_wx), BigInt(o.den));
  r.mean_vector.y() = Rational(BigInt(o.sum_wy), BigInt(o.den));
  r.cycle = o.cycle;
  r.value = to_double(r.mean_vector).dot(theta);
  return r;
}

}  // namespace

MaxMeanCycleResult max_mean_cycle_exact(const DisplacementGraph& g, long long tx, long long ty,
                                        MmcAlgorithm algo,
                                        std::vector<std::uint32_t>* warm_policy) {
  IntDir d = reduce_dir(tx, ty);
  OracleResult o = run_oracle(g, d.x, d.y, algo, warm_policy);
  return finish_result(o, d.x, d.y, Vector2d(static_cast<double>(d.x), static_cast<double>(d.y)));
}

MaxMeanCycleResult max_mean_cycle(const DisplacementGraph& g, const Vector2d& theta,
                                  MmcAlgorithm algo) {
  IntDir d = direction_to_ints(theta);
  OracleResult o = run_oracle(g, d.x, d.y, algo, nullptr);
  return finish_result(o, d.x, d.y, theta);
}

RationalVec2 cycle_mean_vector(const DisplacementGraph& g,
                               const std::vector<std::uint32_t>& cycle) {
  if (cycle.empty()) throw std::invalid_argument("empty cycle");
  long long sx = 0, sy = 0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    std::uint32_t u = cycle[i];
    std::uint32_t v = cycle[(i + 1) % cycle.size()];
    if (u >= g.node_count()) throw std::invalid_argument("cycle node out of range");
    bool found = false;
    for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
      if (g.to[e] == v) {  // parallel labels cannot occur below threshold 1/2
        sx += g.wx[e];
        sy += g.wy[e];
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("cycle uses an absent edge");
  }
  RationalVec2 mean;
  long long len = static_cast<long long>(cycle.size());
  mean.x() = Rational(BigInt(sx), BigInt(len));
  mean.y() = Rational(BigInt(sy), BigInt(len));
  return mean;
}

PseudoOrbit cycle_center_orbit(const DisplacementGraph& g,
                               const std::vector<std::uint32_t>& cycle) {
  if (cycle.empty()) throw std::invalid_argument("empty cycle");
  PseudoOrbit orbit;
  orbit.delta = g.threshold;
  Vector2d x = g.cell_center(cycle[0]);
  orbit.points.push_back(x);
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    std::uint32_t u = cycle[i];
    std::uint32_t v = cycle[(i + 1) % cycle.size()];
    bool found = false;
    for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
      if (g.to[e] == v) {
        x += g.cell_center(v) + Vector2d(g.wx[e], g.wy[e]) - g.cell_center(u);
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("cycle uses an absent edge");
    orbit.points.push_back(x);
  }
  return orbit;
}

namespace {

struct QueryRecord {
  RationalVec2 mean;
  Rational support;  // <mean, dir>, exact
  std::vector<std::uint32_t> cycle;
};

IntDir rational_dir_to_ints(const RationalVec2& d) {
  BigInt l = lcm(denominator(d.x()), denominator(d.y()));
  BigInt ix = numerator(d.x()) * (l / denominator(d.x()));
  BigInt iy = numerator(d.y()) * (l / denominator(d.y()));
  BigInt g = gcd(abs(ix), abs(iy));
  if (g > 1) {
    ix /= g;
    iy /= g;
  }
  if (abs(ix) > BigInt(std::numeric_limits<long long>::max() / 4) ||
      abs(iy) > BigInt(std::numeric_limits<long long>::max() / 4))
    throw std::runtime_error("hull refinement direction exceeds integer range");
  return {ix.convert_to<long long>(), iy.convert_to<long long>()};
}

}  // namespace

PseudoRotationPolygon pseudo_rotation_polygon(const DisplacementGraph& g, int direction_budget) {
  if (!g.has_cycle())
    throw std::runtime_error("no cycles: empty pseudo-rotation set at this resolution");

  PseudoRotationPolygon out;
  std::vector<std::uint32_t> warm;
  std::map<std::pair<long long, long long>, QueryRecord> cache;
  int queries = 0;

  auto query = [&](long long tx, long long ty) -> const QueryRecord& {
    IntDir d = reduce_dir(tx, ty);
    auto key = std::make_pair(d.x, d.y);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    MaxMeanCycleResult r = max_mean_cycle_exact(g, d.x, d.y, MmcAlgorithm::automatic, &warm);
    QueryRecord rec;
    rec.mean = r.mean_vector;
    rec.support = r.exact_value;
    rec.cycle = std::move(r.cycle);
    ++queries;
    return cache.emplace(key, std::move(rec)).first->second;
  };

  std::vector<RationalVec2> points;
  auto add_point = [&](const RationalVec2& p) {
    for (const RationalVec2& q : points)
      if (q == p) return false;
    points.push_back(p);
    return true;
  };

  for (auto [tx, ty] : {std::pair<long long, long long>{1, 0}, {0, 1}, {-1, 0}, {0, -1}})
    add_point(query(tx, ty).mean);

  bool certified = false;
  while (queries <= direction_budget) {
    ConvexRationalPolygon hull = ConvexRationalPolygon::hull(points);
    bool dirty = false;

    if (hull.is_point()) {
      // The four axis queries pin the bounding box; a degenerate box means
      // every cycle mean equals this point.
      const RationalVec2& p = hull.vertex(0);
      certified = query(1, 0).support == p.x() && query(-1, 0).support == -p.x() &&
                  query(0, 1).support == p.y() && query(0, -1).support == -p.y();
      if (!certified) {
        // collect the witnesses that must differ and retry
        for (auto [tx, ty] : {std::pair<long long, long long>{1, 0}, {0, 1}, {-1, 0}, {0, -1}})
          dirty |= add_point(query(tx, ty).mean);
        if (!dirty) break;
        continue;
      }
      break;
    }

    std::vector<RationalVec2> dirs;
    if (hull.is_segment()) {
      RationalVec2 d = hull.vertex(1) - hull.vertex(0);
      RationalVec2 n;
      n << -d.y(), d.x();
      dirs = {n, RationalVec2(-n), d, RationalVec2(-d)};
    } else {
      for (std::size_t i = 0; i < hull.size(); ++i) {
        RationalVec2 e = hull.vertex((i + 1) % hull.size()) - hull.vertex(i);
        RationalVec2 n;
        n << e.y(), -e.x();  // outward normal of a CCW edge
        dirs.push_back(n);
      }
    }

    for (const RationalVec2& nd : dirs) {
      IntDir d = rational_dir_to_ints(nd);
      const QueryRecord& rec = query(d.x, d.y);
      RationalVec2 dir_exact;
      dir_exact << Rational(d.x), Rational(d.y);
      Rational hull_sup = hull.support_exact(dir_exact).exact_value;
      if (rec.support > hull_sup) dirty |= add_point(rec.mean);
      if (queries > direction_budget) break;
    }
    if (!dirty) {
      certified = queries <= direction_budget;
      break;
    }
  }

  out.polygon = ConvexRationalPolygon::hull(points);
  out.certified = certified && g.nontrivial_sccs_form_chain;
  out.support_queries = queries;
  for (const RationalVec2& v : out.polygon.vertices()) {
    bool found = false;
    for (const auto& [key, rec] : cache) {
      if (rec.mean == v) {
        out.vertex_cycles.push_back(rec.cycle);
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("hull vertex without attaining cycle");
  }
  return out;
}

}  // namespace rotaset
