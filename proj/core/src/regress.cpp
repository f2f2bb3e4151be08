#include "enif/regress.hpp"

#include <cmath>
#include <string>

#include <Eigen/QR>

#include "enif/error.hpp"

namespace enif {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::VectorXd SparseRowEstimate::dense(Index p) const {
  VectorXd d = VectorXd::Zero(p);
  for (const auto& [j, v] : coefficients) d[j] = v;
  return d;
}

SparseRowEstimate monotone_lasso_row(const MatrixXd& x, const VectorXd& y, const MonotoneLassoOptions& options) {
  const Index n = x.rows();
  const Index p = x.cols();
  require(y.size() == n, ErrorCode::dimension_mismatch, "monotone lasso: response length differs from member count");
  require(n >= 3, ErrorCode::invalid_argument, "monotone lasso needs at least three members");
  require(options.step > 0.0 && options.step <= 1.0, ErrorCode::invalid_argument, "step must lie in (0, 1]");
  const Index max_iter = options.max_iter.value_or(10 * p);

  SparseRowEstimate est;
  const double nd = static_cast<double>(n);
  const double y_mean = y.mean();
  const double y_sd = std::sqrt((y.array() - y_mean).square().sum() / (nd - 1.0));
  if (!(y_sd > 0.0)) {
    est.cv_curve.push_back(0.0);
    return est;
  }

  const VectorXd x_mean = x.colwise().mean().transpose();
  VectorXd x_sd(p);
  MatrixXd xs = x.rowwise() - x_mean.transpose();
  std::vector<char> usable(static_cast<std::size_t>(p), 0);
  for (Index j = 0; j < p; ++j) {
    x_sd[j] = std::sqrt(xs.col(j).squaredNorm() / (nd - 1.0));
    const double scale = std::max(std::abs(x_mean[j]), 1.0);
    if (x_sd[j] > 1e-12 * scale) {
      xs.col(j) /= x_sd[j];
      usable[static_cast<std::size_t>(j)] = 1;
    } else {
      xs.col(j).setZero();
    }
  }
  const VectorXd sumsq = xs.colwise().squaredNorm().transpose();

  const VectorXd ys = (y.array() - y_mean).matrix() / y_sd;
  VectorXd r = ys;
  VectorXd r_loo = r;
  VectorXd beta = VectorXd::Zero(p);
  double cv = r_loo.squaredNorm() / nd;
  est.cv_curve.push_back(cv);

  for (Index k = 0; k < max_iter; ++k) {
    const VectorXd c = xs.transpose() * r;
    Index best = -1;
    double best_gain = 0.0;
    for (Index j = 0; j < p; ++j) {
      if (!usable[static_cast<std::size_t>(j)]) continue;
      const double gain = c[j] * c[j] / sumsq[j];
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
      }
    }
    if (best < 0) break;  // residual orthogonal to every feature

    const double b = c[best] / sumsq[best];
    const auto xj = xs.col(best);
    // Leave-one-out coefficient via the influence function of the 1D fit, taken at the
    // standardised response rather than the current residual.
    const VectorXd b_loo = (b - ((ys - b * xj).array() * xj.array() / sumsq[best])).matrix();
    const VectorXd next_loo = (r_loo.array() - options.step * b_loo.array() * xj.array()).matrix();
    const double next_cv = next_loo.squaredNorm() / nd;
    est.cv_curve.push_back(next_cv);
    if (!(next_cv < cv)) break;

    beta[best] += options.step * b;
    r -= options.step * b * xj;
    r_loo = next_loo;
    cv = next_cv;
    ++est.iterations_used;
    if (est.iterations_used == max_iter) est.reached_max_iter = true;
  }

  for (Index j = 0; j < p; ++j) {
    if (beta[j] != 0.0) est.coefficients.emplace_back(j, y_sd / x_sd[j] * beta[j]);
  }
  return est;
}

VectorXd lls_row(const MatrixXd& x, const VectorXd& y) {
  const Index n = x.rows();
  const Index p = x.cols();
  require(y.size() == n, ErrorCode::dimension_mismatch, "least squares: response length differs from member count");
  if (n <= p) {
    fail(ErrorCode::underdetermined,
         "least squares needs more members (" + std::to_string(n) + ") than features (" + std::to_string(p) + ")");
  }
  const MatrixXd xc = x.rowwise() - x.colwise().mean();
  const VectorXd yc = (y.array() - y.mean()).matrix();
  Eigen::ColPivHouseholderQR<MatrixXd> qr(xc);
  if (qr.rank() < p) fail(ErrorCode::underdetermined, "least squares design is rank deficient");
  return qr.solve(yc);
}

HEstimate estimate_H(const MatrixXd& x, const MatrixXd& y, HMethod method, const SparseMatrix* known_h,
                     const MonotoneLassoOptions& options) {
  require(x.rows() == y.rows(), ErrorCode::dimension_mismatch, "states and responses have different member counts");
  const Index p = x.cols();
  const Index m = y.cols();
  HEstimate est;
  est.iterations.assign(static_cast<std::size_t>(m), 0);

  if (method == HMethod::known) {
    require(known_h != nullptr, ErrorCode::invalid_argument, "known observation operator not supplied");
    require(known_h->rows() == m && known_h->cols() == p, ErrorCode::dimension_mismatch,
            "known observation operator has the wrong shape");
    est.H = *known_h;
  } else {
    std::vector<Eigen::Triplet<double>> t;
    for (Index r = 0; r < m; ++r) {
      if (method == HMethod::lls) {
        const VectorXd row = lls_row(x, y.col(r));
        for (Index j = 0; j < p; ++j) {
          if (row[j] != 0.0) t.emplace_back(r, j, row[j]);
        }
      } else {
        const SparseRowEstimate row = monotone_lasso_row(x, y.col(r), options);
        est.iterations[static_cast<std::size_t>(r)] = row.iterations_used;
        for (const auto& [j, v] : row.coefficients) t.emplace_back(r, j, v);
      }
    }
    est.H.resize(m, p);
    est.H.setFromTriplets(t.begin(), t.end());
    est.H.makeCompressed();
  }

  est.residual_variance.resize(m);
  if (x.rows() >= 2) {
    const MatrixXd resid = y - x * SparseMatrix(est.H.transpose());
    const MatrixXd centred = resid.rowwise() - resid.colwise().mean();
    est.residual_variance = centred.colwise().squaredNorm().transpose() / static_cast<double>(x.rows() - 1);
  } else {
    est.residual_variance.setZero();
  }
  return est;
}

}  // namespace enif
