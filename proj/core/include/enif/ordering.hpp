#pragma once

#include "enif/graph.hpp"
#include "enif/permutation.hpp"

namespace enif {

enum class OrderingMethod { natural, rcm };

/// Fill-reducing elimination order for the graph's precision pattern.
///
/// `rcm` runs reverse Cuthill-McKee on every connected component (components in order of their
/// smallest vertex; start vertex is a pseudo-peripheral node; neighbours visited by ascending
/// degree, then ascending index). If the result fills more than the natural order, the natural
/// order is returned instead, so the fill never exceeds the identity ordering.
Permutation fill_reducing_order(const CIGraph& g, OrderingMethod method = OrderingMethod::rcm);

/// Ordering for the lower-triangular transport factor C given a Cholesky ordering P_*.
///
/// If L L^T = P_* A P_*^T then C = (P_r L P_r)^T is lower triangular with C^T C = Q A Q^T for
/// the returned Q = P_r P_*, and C has exactly the sparsity of L.
Permutation kr_order_from_cholesky(const Permutation& cholesky_order);

}  // namespace enif
