#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "enif/permutation.hpp"

namespace enif {

class SparseSpd;

struct Edge {
  Index a;
  Index b;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected conditional-independence graph on vertices {0..p-1}.
///
/// Adjacency lists are sorted and symmetric. Values are immutable once built.
class CIGraph {
 public:
  CIGraph() = default;
  explicit CIGraph(Index p);
  /// Duplicate edges (in either orientation) are merged; self loops and out-of-range
  /// indices throw InvalidArgument.
  CIGraph(Index p, std::span<const Edge> edges);

  Index size() const noexcept { return static_cast<Index>(adjacency_.size()); }
  Index edge_count() const noexcept { return edge_count_; }
  std::span<const Index> neighbours(Index v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  Index degree(Index v) const { return static_cast<Index>(adjacency_[static_cast<std::size_t>(v)].size()); }
  Index max_degree() const noexcept;
  bool has_edge(Index a, Index b) const;

  /// Edges as (a, b) with a < b, lexicographically sorted.
  std::vector<Edge> edges() const;

  bool is_subgraph_of(const CIGraph& other) const;

  /// Relabels vertex v as new label `inverse(perm)[v]`, i.e. vertex perm[k] becomes k.
  CIGraph relabelled(const Permutation& perm) const;

  friend bool operator==(const CIGraph& a, const CIGraph& b) { return a.adjacency_ == b.adjacency_; }

 private:
  std::vector<std::vector<Index>> adjacency_;
  Index edge_count_ = 0;
};

enum class IntegratorScheme { euler, rk4 };
enum class Neighbourhood { four, eight };

/// AR-1 style chain: edges (t, t+1).
CIGraph chain_graph(Index p);

/// Vertex j adjacent to j +- 1..order (mod p). Requires p >= 3 and 1 <= order < p/2.
CIGraph circular_markov_graph(Index p, Index order);

/// Dependence pattern induced on the state by one step of the Lorenz-96 integrator.
///
/// The stencil of x_j(t+dt) is {j-2..j+1} for Euler and {j-6..j+3} for RK4; states sharing a
/// stencil are joined, which yields cyclic bands of half-width 3 (Euler) and 9 (RK4).
CIGraph lorenz96_stencil_graph(Index m, IntegratorScheme scheme);

/// Row-major lattice, vertex (r, c) has index r * cols + c.
CIGraph lattice_graph(Index rows, Index cols, Neighbourhood neighbourhood = Neighbourhood::eight);

CIGraph complete_graph(Index p);

/// Stacks `blocks` copies of a spatial graph in time. Within a block the pattern is
/// `within`; consecutive blocks are joined by `across` (vertex i at t to vertex j at t+1
/// whenever i == j or (i, j) is an edge of `across`).
CIGraph temporal_block_graph(const CIGraph& within, const CIGraph& across, Index blocks);

/// Edge iff an off-diagonal entry is stored with non-zero value.
CIGraph graph_from_sparsity(const SparseSpd& m);

/// Edge list text: first line "p", then one "i j" line per edge (0-based).
void write_edge_list(std::ostream& out, const CIGraph& g);
CIGraph read_edge_list(std::istream& in);

}  // namespace enif
