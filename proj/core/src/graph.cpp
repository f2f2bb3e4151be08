#include "enif/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "enif/error.hpp"
#include "enif/sparse.hpp"

namespace enif {

CIGraph::CIGraph(Index p) : adjacency_(static_cast<std::size_t>(p)) {
  require(p >= 0, ErrorCode::invalid_argument, "negative vertex count");
}

CIGraph::CIGraph(Index p, std::span<const Edge> edges) : CIGraph(p) {
  for (const Edge& e : edges) {
    require(e.a >= 0 && e.a < p && e.b >= 0 && e.b < p, ErrorCode::invalid_argument,
            "edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ") out of range");
    require(e.a != e.b, ErrorCode::invalid_argument, "self loop at vertex " + std::to_string(e.a));
    adjacency_[static_cast<std::size_t>(e.a)].push_back(e.b);
    adjacency_[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  Index twice = 0;
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    twice += static_cast<Index>(nbrs.size());
  }
  edge_count_ = twice / 2;
}

Index CIGraph::max_degree() const noexcept {
  Index d = 0;
  for (const auto& nbrs : adjacency_) d = std::max(d, static_cast<Index>(nbrs.size()));
  return d;
}

bool CIGraph::has_edge(Index a, Index b) const {
  if (a < 0 || b < 0 || a >= size() || b >= size()) return false;
  const auto& nbrs = adjacency_[static_cast<std::size_t>(a)];
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<Edge> CIGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (Index a = 0; a < size(); ++a) {
    for (Index b : neighbours(a)) {
      if (a < b) out.push_back({a, b});
    }
  }
  return out;
}

bool CIGraph::is_subgraph_of(const CIGraph& other) const {
  if (size() != other.size()) return false;
  for (const Edge& e : edges()) {
    if (!other.has_edge(e.a, e.b)) return false;
  }
  return true;
}

CIGraph CIGraph::relabelled(const Permutation& perm) const {
  require(perm.size() == size(), ErrorCode::dimension_mismatch, "relabel: permutation size");
  const Permutation inv = perm.inverse();
  std::vector<Edge> e = edges();
  for (Edge& x : e) x = {inv[x.a], inv[x.b]};
  return CIGraph(size(), e);
}

CIGraph chain_graph(Index p) {
  std::vector<Edge> e;
  for (Index t = 0; t + 1 < p; ++t) e.push_back({t, t + 1});
  return CIGraph(p, e);
}

CIGraph circular_markov_graph(Index p, Index order) {
  require(p >= 3, ErrorCode::too_few_states, "circular graph needs at least 3 states");
  if (order < 1 || 2 * order >= p) {
    fail(ErrorCode::order_too_large,
         "Markov order " + std::to_string(order) + " must satisfy 1 <= k < p/2 for p = " + std::to_string(p));
  }
  std::vector<Edge> e;
  for (Index j = 0; j < p; ++j) {
    for (Index k = 1; k <= order; ++k) e.push_back({j, (j + k) % p});
  }
  return CIGraph(p, e);
}

CIGraph lorenz96_stencil_graph(Index m, IntegratorScheme scheme) {
  require(m >= 4, ErrorCode::too_few_states, "Lorenz-96 needs at least 4 states");
  require(scheme != IntegratorScheme::rk4 || m >= 13, ErrorCode::too_few_states,
          "RK4 stencil needs at least 13 states");
  // Stencil {j-lo .. j+hi}; two states sharing any stencil are at cyclic distance <= lo + hi.
  const Index reach = scheme == IntegratorScheme::euler ? 2 + 1 : 6 + 3;
  std::vector<Edge> e;
  for (Index j = 0; j < m; ++j) {
    for (Index k = 1; k <= reach; ++k) {
      const Index other = (j + k) % m;
      if (other != j) e.push_back({j, other});
    }
  }
  return CIGraph(m, e);
}

CIGraph lattice_graph(Index rows, Index cols, Neighbourhood neighbourhood) {
  require(rows >= 1 && cols >= 1, ErrorCode::invalid_argument, "lattice needs positive dimensions");
  std::vector<Edge> e;
  auto id = [cols](Index r, Index c) { return r * cols + c; };
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) e.push_back({id(r, c), id(r + 1, c)});
      if (neighbourhood == Neighbourhood::eight && r + 1 < rows) {
        if (c + 1 < cols) e.push_back({id(r, c), id(r + 1, c + 1)});
        if (c > 0) e.push_back({id(r, c), id(r + 1, c - 1)});
      }
    }
  }
  return CIGraph(rows * cols, e);
}

CIGraph complete_graph(Index p) {
  std::vector<Edge> e;
  for (Index a = 0; a < p; ++a) {
    for (Index b = a + 1; b < p; ++b) e.push_back({a, b});
  }
  return CIGraph(p, e);
}

CIGraph temporal_block_graph(const CIGraph& within, const CIGraph& across, Index blocks) {
  require(within.size() == across.size(), ErrorCode::dimension_mismatch, "temporal graph: block sizes differ");
  require(blocks >= 1, ErrorCode::invalid_argument, "temporal graph needs at least one block");
  const Index s = within.size();
  std::vector<Edge> e;
  for (Index t = 0; t < blocks; ++t) {
    for (const Edge& x : within.edges()) e.push_back({t * s + x.a, t * s + x.b});
    if (t + 1 == blocks) continue;
    for (Index i = 0; i < s; ++i) {
      e.push_back({t * s + i, (t + 1) * s + i});
      for (Index j : across.neighbours(i)) e.push_back({t * s + i, (t + 1) * s + j});
    }
  }
  return CIGraph(s * blocks, e);
}

CIGraph graph_from_sparsity(const SparseSpd& m) {
  std::vector<Edge> e;
  for (const Triplet& t : m.triplets()) {
    if (t.row != t.col && t.value != 0.0) e.push_back({t.row, t.col});
  }
  return CIGraph(m.dim(), e);
}

void write_edge_list(std::ostream& out, const CIGraph& g) {
  out << g.size() << '\n';
  for (const Edge& e : g.edges()) out << e.a << ' ' << e.b << '\n';
}

CIGraph read_edge_list(std::istream& in) {
  Index p = 0;
  if (!(in >> p) || p < 0) fail(ErrorCode::parse_error, "edge list: expected vertex count");
  std::vector<Edge> e;
  Index a = 0;
  Index b = 0;
  while (in >> a) {
    if (!(in >> b)) fail(ErrorCode::parse_error, "edge list: dangling vertex index");
    if (a < 0 || b < 0 || a >= p || b >= p || a == b) {
      fail(ErrorCode::parse_error, "edge list: invalid edge " + std::to_string(a) + " " + std::to_string(b));
    }
    e.push_back({a, b});
  }
  if (!in.eof()) fail(ErrorCode::parse_error, "edge list: unreadable token");
  return CIGraph(p, e);
}

}  // namespace enif
