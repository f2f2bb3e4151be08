#include "enif/ordering.hpp"

#include <algorithm>

#include "enif/sparse.hpp"

namespace enif {

namespace {

struct LevelInfo {
  Index eccentricity = 0;
  std::vector<Index> last_level;
};

LevelInfo level_structure(const CIGraph& g, Index root, std::vector<Index>& level) {
  std::fill(level.begin(), level.end(), Index{-1});
  std::vector<Index> frontier{root};
  level[static_cast<std::size_t>(root)] = 0;
  LevelInfo info;
  while (!frontier.empty()) {
    info.last_level = frontier;
    std::vector<Index> next;
    for (Index v : frontier) {
      for (Index w : g.neighbours(v)) {
        if (level[static_cast<std::size_t>(w)] < 0) {
          level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(v)] + 1;
          next.push_back(w);
        }
      }
    }
    if (!next.empty()) ++info.eccentricity;
    frontier = std::move(next);
  }
  return info;
}

Index min_degree_vertex(const CIGraph& g, const std::vector<Index>& candidates) {
  Index best = candidates.front();
  for (Index v : candidates) {
    if (g.degree(v) < g.degree(best) || (g.degree(v) == g.degree(best) && v < best)) best = v;
  }
  return best;
}

Index pseudo_peripheral(const CIGraph& g, const std::vector<Index>& component) {
  std::vector<Index> level(static_cast<std::size_t>(g.size()), -1);
  Index root = min_degree_vertex(g, component);
  LevelInfo info = level_structure(g, root, level);
  for (;;) {
    const Index candidate = min_degree_vertex(g, info.last_level);
    LevelInfo next = level_structure(g, candidate, level);
    if (next.eccentricity <= info.eccentricity) return root;
    root = candidate;
    info = std::move(next);
  }
}

std::vector<Index> reverse_cuthill_mckee(const CIGraph& g) {
  const Index p = g.size();
  std::vector<char> placed(static_cast<std::size_t>(p), 0);
  std::vector<char> in_component(static_cast<std::size_t>(p), 0);
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(p));

  for (Index s = 0; s < p; ++s) {
    if (placed[static_cast<std::size_t>(s)]) continue;
    // Collect the component containing s.
    std::vector<Index> component{s};
    in_component[static_cast<std::size_t>(s)] = 1;
    for (std::size_t q = 0; q < component.size(); ++q) {
      for (Index w : g.neighbours(component[q])) {
        if (!in_component[static_cast<std::size_t>(w)]) {
          in_component[static_cast<std::size_t>(w)] = 1;
          component.push_back(w);
        }
      }
    }

    const Index start = pseudo_peripheral(g, component);
    std::vector<Index> cm{start};
    placed[static_cast<std::size_t>(start)] = 1;
    for (std::size_t q = 0; q < cm.size(); ++q) {
      std::vector<Index> fresh;
      for (Index w : g.neighbours(cm[q])) {
        if (!placed[static_cast<std::size_t>(w)]) fresh.push_back(w);
      }
      std::sort(fresh.begin(), fresh.end(), [&](Index a, Index b) {
        return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
      });
      for (Index w : fresh) {
        placed[static_cast<std::size_t>(w)] = 1;
        cm.push_back(w);
      }
    }
    order.insert(order.end(), cm.rbegin(), cm.rend());
  }
  return order;
}

}  // namespace

Permutation fill_reducing_order(const CIGraph& g, OrderingMethod method) {
  const Index p = g.size();
  if (method == OrderingMethod::natural || p <= 1) return Permutation::identity(p);
  Permutation rcm(reverse_cuthill_mckee(g), PermutationKind::fill_reducing);
  if (rcm.is_identity()) return Permutation::identity(p);
  const Permutation natural = Permutation::identity(p);
  if (cholesky_nnz(g, rcm) > cholesky_nnz(g, natural)) return natural;
  return rcm;
}

Permutation kr_order_from_cholesky(const Permutation& cholesky_order) {
  return compose(Permutation::reverse(cholesky_order.size()), cholesky_order);
}

}  // namespace enif
