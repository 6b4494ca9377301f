// Independent oracles used by the test suites. They deliberately avoid the
// library's algorithms: the hull oracle checks edges against every point, the
// cycle oracle enumerates all simple cycles, the Hausdorff oracle samples
// polygon boundaries densely.
#pragma once

#include "rotaset/geometry.hpp"
#include "rotaset/transition_graph.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace rotaset::oracle {

// O(n^3) convex hull: a directed pair (p, q) is a hull edge iff every other
// point lies strictly left of it, or on it between p and q. Returns the CCW
// vertex list starting at the lexicographic minimum.
inline std::vector<RationalVec2> brute_force_hull(std::vector<RationalVec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const RationalVec2& a, const RationalVec2& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const RationalVec2& a, const RationalVec2& b) { return a == b; }),
            pts.end());
  if (pts.size() == 1) return pts;

  std::map<std::size_t, std::size_t> next;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      RationalVec2 d = pts[j] - pts[i];
      bool edge = true;
      for (std::size_t r = 0; r < pts.size() && edge; ++r) {
        if (r == i || r == j) continue;
        Rational c = cross2(d, RationalVec2(pts[r] - pts[i]));
        if (c < 0) edge = false;
        if (c == 0) {
          Rational t = RationalVec2(pts[r] - pts[i]).dot(d);
          if (t < 0 || t > d.dot(d)) edge = false;  // collinear but outside the span
        }
      }
      if (edge) next[i] = j;
    }
  }
  std::vector<RationalVec2> hull;
  std::size_t start = 0;  // pts sorted, so 0 is the lexicographic minimum
  std::size_t cur = start;
  do {
    hull.push_back(pts[cur]);
    cur = next.at(cur);
  } while (cur != start && hull.size() <= pts.size());
  if (hull.size() == 2 && hull[0] == hull[1]) hull.resize(1);
  return hull;
}

// All simple cycles of a small graph by DFS from each minimal start node;
// returns exact mean vectors together with the best mean in a direction.
struct EnumeratedCycles {
  std::vector<RationalVec2> means;
  std::vector<std::vector<std::uint32_t>> cycles;
};

inline EnumeratedCycles enumerate_simple_cycles(const DisplacementGraph& g) {
  EnumeratedCycles out;
  std::size_t n = g.node_count();
  std::vector<std::uint32_t> path;
  std::vector<std::int8_t> onpath(n, 0);
  std::vector<long long> sumx, sumy;

  // DFS that only visits nodes >= start counts each cycle once, from its
  // minimal node.
  struct Frame {
    std::uint32_t node;
    std::uint64_t edge;
  };
  for (std::uint32_t start = 0; start < n; ++start) {
    std::vector<Frame> stack;
    stack.push_back({start, g.offsets[start]});
    path.assign(1, start);
    onpath.assign(n, 0);
    onpath[start] = 1;
    sumx.assign(1, 0);
    sumy.assign(1, 0);
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.edge < g.offsets[f.node + 1]) {
        std::uint64_t e = f.edge++;
        std::uint32_t v = g.to[e];
        if (v < start) continue;
        long long sx = sumx.back() + g.wx[e];
        long long sy = sumy.back() + g.wy[e];
        if (v == start) {
          long long len = static_cast<long long>(path.size());
          RationalVec2 mean;
          mean << Rational(BigInt(sx), BigInt(len)), Rational(BigInt(sy), BigInt(len));
          out.means.push_back(mean);
          out.cycles.push_back(path);
          continue;
        }
        if (onpath[v]) continue;
        onpath[v] = 1;
        path.push_back(v);
        sumx.push_back(sx);
        sumy.push_back(sy);
        stack.push_back({v, g.offsets[v]});
      } else {
        stack.pop_back();
        onpath[f.node] = 0;
        path.pop_back();
        sumx.pop_back();
        sumy.pop_back();
      }
    }
  }
  return out;
}

inline Rational best_mean_in_direction(const EnumeratedCycles& cycles, long long tx,
                                       long long ty) {
  Rational best;
  bool any = false;
  RationalVec2 dir;
  dir << Rational(tx), Rational(ty);
  for (const RationalVec2& m : cycles.means) {
    Rational v = m.dot(dir);
    if (!any || v > best) {
      best = v;
      any = true;
    }
  }
  if (!any) throw std::runtime_error("oracle: graph has no cycle");
  return best;
}

// Hausdorff estimate by dense boundary sampling (vertices included, so the
// estimate meets the exact value at polygon vertices).
inline double sampled_hausdorff(const ConvexRationalPolygon& P, const ConvexRationalPolygon& Q,
                                int samples_per_edge = 64) {
  auto one_sided = [&](const ConvexRationalPolygon& A, const ConvexRationalPolygon& B) {
    double worst = 0;
    std::size_t edges = A.size() == 1 ? 1 : A.size();
    for (std::size_t i = 0; i < edges; ++i) {
      Vector2d a = to_double(A.vertex(i));
      Vector2d b = to_double(A.vertex((i + 1) % A.size()));
      for (int s = 0; s < samples_per_edge; ++s) {
        double t = static_cast<double>(s) / samples_per_edge;
        Vector2d p = a + t * (b - a);
        worst = std::max(worst, dist_point_scaled_polygon(p, 1, B));
      }
    }
    return worst;
  };
  return std::max(one_sided(P, Q), one_sided(Q, P));
}

}  // namespace rotaset::oracle
