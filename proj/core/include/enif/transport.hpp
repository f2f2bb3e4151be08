#pragma once

#include <iosfwd>
#include <optional>

#include <Eigen/Core>

#include "enif/ensemble.hpp"
#include "enif/graph.hpp"
#include "enif/permutation.hpp"
#include "enif/sparse.hpp"

namespace enif {

/// Divisor used for the residual variance of each row regression.
///
/// `sample_covariance` (n - 1) makes the complete-graph fit reproduce the sample covariance
/// exactly; `maximum_likelihood` (n) is the Gaussian MLE.
enum class ResidualScale { sample_covariance, maximum_likelihood };

struct KrFitOptions {
  /// Cholesky ordering P_* of the graph; defaults to fill_reducing_order(graph).
  std::optional<Permutation> cholesky_order;
  ResidualScale residual_scale = ResidualScale::sample_covariance;
};

/// Affine Knothe-Rosenblatt map z = C Q (u - mean) with C lower triangular.
///
/// Q = kr_order_from_cholesky(cholesky_order) and the estimated precision is
/// Lambda = Q^T C^T C Q.
struct KRMap {
  SparseMatrix C;
  Permutation order;
  Permutation cholesky_order;
  Eigen::VectorXd mean;
  CIGraph graph;

  Index dim() const noexcept { return C.rows(); }
  /// Reference-space image of each member (rows of the result).
  Eigen::MatrixXd forward(const Ensemble& ens) const;
};

/// Row j of C: regress the j-th variable (in KR order) on its pattern predecessors by least
/// squares on centred data. C_jj = 1 / s_j, C_jk = -beta_k / s_j with s_j the residual
/// standard deviation. Throws UnderdeterminedRow when a row has n - 1 or more predictors (or
/// its normal equations are singular) and ZeroResidual when s_j collapses.
KRMap fit_affine_kr(const Ensemble& ens, const CIGraph& graph, const KrFitOptions& options = {});

/// Structural predecessors of each row of C under `cholesky_order`; row j lists k < j.
std::vector<std::vector<Index>> kr_row_patterns(const CIGraph& graph, const Permutation& cholesky_order);

/// Lambda = Q^T C^T C Q in the original labelling.
SparseSpd unwrap_precision(const KRMap& map);

/// Average negative log density of the members under N(mean, prec^{-1}).
double gaussian_nll(const Ensemble& ens, const SparseSpd& prec, const Eigen::VectorXd& mean);

/// Text form: "p", KR order, Cholesky order, mean (one line each), then C as triplets.
void write_kr_map(std::ostream& out, const KRMap& map);
KRMap read_kr_map(std::istream& in);

}  // namespace enif
