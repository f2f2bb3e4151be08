#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "enif/fem.hpp"
#include "enif/graph.hpp"
#include "enif/ordering.hpp"
#include "enif/simulators.hpp"
#include "enif/sparse.hpp"
#include "enif/transport.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"

using enif::CIGraph;
using enif::Index;

namespace {

CIGraph star_graph(Index p, Index centre) {
  std::vector<enif::Edge> edges;
  for (Index v = 0; v < p; ++v) {
    if (v != centre) edges.push_back({std::min(v, centre), std::max(v, centre)});
  }
  return CIGraph(p, edges);
}

Index fill(const CIGraph& g, const std::vector<Index>& order) {
  return oracle::elimination_fill(g, order) - g.size() - g.edge_count();
}

std::vector<Index> order_of(const enif::Permutation& p) { return {p.order().begin(), p.order().end()}; }

std::set<Index> offsets(const CIGraph& g, Index v) {
  std::set<Index> out;
  for (Index w : g.neighbours(v)) {
    Index d = (w - v + g.size()) % g.size();
    out.insert(d > g.size() / 2 ? d - g.size() : d);
  }
  return out;
}

}  // namespace

TEST(ChainGraph, Examples) {
  EXPECT_EQ(enif::chain_graph(1).edge_count(), 0);
  const CIGraph g4 = enif::chain_graph(4);
  EXPECT_EQ(g4.edges(), (std::vector<enif::Edge>{{0, 1}, {1, 2}, {2, 3}}));
  const CIGraph g100 = enif::chain_graph(100);
  EXPECT_EQ(g100.edge_count(), 99);
  EXPECT_EQ(g100.max_degree(), 2);
}

TEST(CircularMarkovGraph, Examples) {
  const CIGraph g = enif::circular_markov_graph(40, 1);
  EXPECT_EQ(g.edge_count(), 40);
  for (Index v = 0; v < 40; ++v) EXPECT_EQ(g.degree(v), 2);
  EXPECT_EQ(enif::circular_markov_graph(5, 2), enif::complete_graph(5));
  const CIGraph g7 = enif::circular_markov_graph(40, 7);
  for (Index v = 0; v < 40; ++v) EXPECT_EQ(g7.degree(v), 14);
  EXPECT_TRUE(g7.has_edge(0, 33));
  EXPECT_FALSE(g7.has_edge(0, 8));
}

TEST(CircularMarkovGraph, OrderTooLarge) {
  EXPECT_ENIF_ERROR(enif::circular_markov_graph(10, 5), enif::ErrorCode::order_too_large);
  EXPECT_ENIF_ERROR(enif::circular_markov_graph(10, 0), enif::ErrorCode::order_too_large);
}

TEST(CircularMarkovGraph, EdgesGrowWithOrder) {
  Index previous = 0;
  for (Index k = 1; 2 * k < 41; ++k) {
    const CIGraph g = enif::circular_markov_graph(41, k);
    EXPECT_GT(g.edge_count(), previous);
    if (k > 1) {
      EXPECT_TRUE(enif::circular_markov_graph(41, k - 1).is_subgraph_of(g));
    }
    previous = g.edge_count();
  }
}

TEST(Lorenz96StencilGraph, Degrees) {
  const CIGraph euler = enif::lorenz96_stencil_graph(40, enif::IntegratorScheme::euler);
  const CIGraph rk4 = enif::lorenz96_stencil_graph(40, enif::IntegratorScheme::rk4);
  for (Index v = 0; v < 40; ++v) {
    EXPECT_EQ(euler.degree(v), 6);
    EXPECT_EQ(rk4.degree(v), 18);
  }
  EXPECT_EQ(offsets(euler, 10), (std::set<Index>{-3, -2, -1, 1, 2, 3}));
  EXPECT_TRUE(euler.is_subgraph_of(rk4));
}

TEST(Lorenz96StencilGraph, TooFewStates) {
  EXPECT_ENIF_ERROR(enif::lorenz96_stencil_graph(3, enif::IntegratorScheme::euler), enif::ErrorCode::too_few_states);
  EXPECT_ENIF_ERROR(enif::lorenz96_stencil_graph(12, enif::IntegratorScheme::rk4), enif::ErrorCode::too_few_states);
}

TEST(LatticeGraph, EdgeCounts) {
  EXPECT_EQ(enif::lattice_graph(1, 1).edge_count(), 0);
  EXPECT_EQ(enif::lattice_graph(3, 3, enif::Neighbourhood::four).edge_count(), 12);
  EXPECT_EQ(enif::lattice_graph(10, 10, enif::Neighbourhood::eight).edge_count(), 342);
  for (Index r = 1; r < 7; ++r) {
    for (Index c = 1; c < 7; ++c) {
      EXPECT_EQ(enif::lattice_graph(r, c, enif::Neighbourhood::four).edge_count(), 2 * r * c - r - c);
      EXPECT_EQ(enif::lattice_graph(r, c, enif::Neighbourhood::eight).edge_count(), 4 * r * c - 3 * r - 3 * c + 2);
    }
  }
}

TEST(GraphFromSparsity, Examples) {
  EXPECT_EQ(enif::graph_from_sparsity(enif::SparseSpd::identity(5)).edge_count(), 0);
  EXPECT_EQ(enif::graph_from_sparsity(*enif::ar1_oracle(30, 0.7).prec), enif::chain_graph(30));
}

TEST(GraphFromSparsity, TemporalBlocksOfHeatPrecision) {
  const enif::TriangleMesh mesh = enif::rectangle_mesh(4, 3, 1.0, 1.0);
  const enif::HeatModel model = enif::fem_heat_assemble(mesh, 1.0, 1.0, 0.01);
  const CIGraph g = enif::graph_from_sparsity(enif::smoothing_precision(model, 3));
  const Index s = mesh.node_count();
  ASSERT_EQ(g.size(), 3 * s);
  for (const enif::Edge& e : g.edges()) EXPECT_LE(e.b / s - e.a / s, 1) << e.a << " " << e.b;
  EXPECT_TRUE(g.has_edge(0, s));
  EXPECT_FALSE(g.has_edge(0, 2 * s));
}

TEST(EdgeList, RoundTrip) {
  const CIGraph g = enif::lattice_graph(4, 5);
  std::stringstream s;
  enif::write_edge_list(s, g);
  EXPECT_EQ(enif::read_edge_list(s), g);
  std::stringstream bad("3\n0 3\n");
  EXPECT_ENIF_ERROR(enif::read_edge_list(bad), enif::ErrorCode::parse_error);
}

TEST(FillReducingOrder, ChainHasNoFill) {
  const CIGraph g = enif::chain_graph(5);
  EXPECT_EQ(fill(g, order_of(enif::fill_reducing_order(g))), 0);
}

TEST(FillReducingOrder, StarCentreIsNotEliminatedFirst) {
  const Index p = 9;
  const CIGraph g = star_graph(p, 0);
  const std::vector<Index> order = order_of(enif::fill_reducing_order(g));
  EXPECT_EQ(fill(g, order), 0);
  EXPECT_NE(order.front(), 0);
  // Eliminating the centre first couples every pair of leaves.
  EXPECT_EQ(fill(g, oracle::natural(p)), (p - 1) * (p - 2) / 2);
}

TEST(FillReducingOrder, LatticeBeatsRowMajor) {
  const CIGraph g = enif::lattice_graph(8, 8, enif::Neighbourhood::four);
  const Index natural = oracle::elimination_fill(g, oracle::natural(64));
  EXPECT_LT(enif::cholesky_nnz(g, enif::fill_reducing_order(g)), natural);
}

TEST(KrOrder, Examples) {
  EXPECT_TRUE(enif::kr_order_from_cholesky(enif::Permutation::identity(1)).is_identity());
  const CIGraph g = enif::chain_graph(4);
  const enif::Permutation star = enif::fill_reducing_order(g);
  Index nnz = 0;
  for (const auto& row : enif::kr_row_patterns(g, star)) {
    EXPECT_LE(row.size(), 1u);
    nnz += 1 + static_cast<Index>(row.size());
  }
  EXPECT_EQ(nnz, 7);
}

TEST(GraphProperty, RelabellingIsEquivariant) {
  std::mt19937_64 rng(8);
  const std::vector<CIGraph> graphs{enif::chain_graph(12), enif::circular_markov_graph(12, 3),
                                    enif::lattice_graph(3, 4), enif::lorenz96_stencil_graph(13, enif::IntegratorScheme::rk4)};
  for (const CIGraph& g : graphs) {
    for (int trial = 0; trial < 20; ++trial) {
      const enif::Permutation perm(oracle::random_order(g.size(), rng));
      const CIGraph h = g.relabelled(perm);
      ASSERT_EQ(h.edge_count(), g.edge_count());
      for (const enif::Edge& e : g.edges()) {
        ASSERT_TRUE(h.has_edge(perm.inverse()[e.a], perm.inverse()[e.b]));
      }
      ASSERT_EQ(h.relabelled(perm.inverse()), g);
    }
  }
}

TEST(GraphProperty, BuildersAreDeterministic) {
  for (Index p = 5; p < 30; ++p) {
    ASSERT_EQ(enif::circular_markov_graph(p, 2), enif::circular_markov_graph(p, 2));
    ASSERT_EQ(enif::lattice_graph(p / 3, 3), enif::lattice_graph(p / 3, 3));
  }
}

TEST(GraphProperty, SparsityPatternRecoversGraph) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const CIGraph g = oracle::random_graph(2 + trial % 20, 0.2, rng);
    const CIGraph back = enif::graph_from_sparsity(oracle::random_spd(g, rng));
    ASSERT_EQ(back, g);
  }
}
