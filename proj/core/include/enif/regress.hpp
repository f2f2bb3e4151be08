#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "enif/ensemble.hpp"
#include "enif/sparse.hpp"

namespace enif {

struct MonotoneLassoOptions {
  /// Fraction of the 1D least-squares coefficient added per step.
  double step = 0.1;
  /// Defaults to 10 * p.
  std::optional<Index> max_iter;
};

struct SparseRowEstimate {
  /// (feature, coefficient on the original scale), sorted by feature.
  std::vector<std::pair<Index, double>> coefficients;
  Index iterations_used = 0;
  /// Approximate leave-one-out mse after 0, 1, ... steps; the entry after `iterations_used`
  /// is the rejected step that stopped the path (absent when max_iter was reached).
  std::vector<double> cv_curve;
  bool reached_max_iter = false;

  Eigen::VectorXd dense(Index p) const;
};

/// Forward-stagewise (monotone lasso) boosting with 1D linear learners on standardised data.
///
/// Each step picks the feature whose 1D fit to the current residual reduces training mse the
/// most (lowest index on ties) and adds `step` times its coefficient b_j. Leave-one-out residuals
/// are tracked with the one-term influence approximation b_j - (y_i - b_j x_ij) x_ij / sum_i x_ij^2
/// (y the standardised response), and the path stops before the first step that does not lower
/// their mean square. Constant features are never
/// selected; a constant response gives an empty estimate.
SparseRowEstimate monotone_lasso_row(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                     const MonotoneLassoOptions& options = {});

/// Ordinary least squares on centred data. Throws Underdetermined unless n > p.
Eigen::VectorXd lls_row(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

enum class HMethod { known, monotone_lasso, lls };

struct HEstimate {
  SparseMatrix H;
  /// Sample variance (divisor n - 1) of y_r - H_r u per response.
  Eigen::VectorXd residual_variance;
  /// Boosting iterations per row (zero for other methods).
  std::vector<Index> iterations;
};

/// Row-by-row estimate of the linear observation operator from member-aligned states x (n x p)
/// and responses y (n x m). `known` returns `known_h` unchanged, which must then be given.
HEstimate estimate_H(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, HMethod method,
                     const SparseMatrix* known_h = nullptr, const MonotoneLassoOptions& options = {});

}  // namespace enif
