#include "enif/evaluate.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "enif/error.hpp"
#include "enif/ordering.hpp"

namespace enif {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct DenseFactor {
  Eigen::LLT<MatrixXd> llt;
  double log_det = 0.0;
};

DenseFactor factor_dense(const MatrixXd& m, const char* what) {
  DenseFactor f{Eigen::LLT<MatrixXd>(m), 0.0};
  if (f.llt.info() != Eigen::Success) fail(ErrorCode::not_positive_definite, std::string(what) + " is not positive definite");
  const auto& l = f.llt.matrixLLT();
  for (Index i = 0; i < m.rows(); ++i) {
    if (!(l(i, i) > 0.0)) fail(ErrorCode::not_positive_definite, std::string(what) + " is not positive definite");
    f.log_det += 2.0 * std::log(l(i, i));
  }
  return f;
}

KldReport finish(double mean_quad, double trace, double log_det_q, double log_det_p, Index p) {
  KldReport r;
  r.mean_term = 0.5 * mean_quad;
  r.trace_term = 0.5 * (trace - static_cast<double>(p));
  r.log_det_term = 0.5 * (log_det_q - log_det_p);
  r.total = r.mean_term + r.trace_term + r.log_det_term;
  r.per_variable_average = p > 0 ? r.total / static_cast<double>(p) : 0.0;
  return r;
}

// tr(A B) for symmetric A stored as lower triangle and dense symmetric B.
double trace_product(const SparseSpd& a, const MatrixXd& b) {
  double t = 0.0;
  for (const Triplet& e : a.triplets()) t += (e.row == e.col ? 1.0 : 2.0) * e.value * b(e.row, e.col);
  return t;
}

}  // namespace

KldReport gaussian_kld(const GaussianOracle& p0, const VectorXd& q_mean, const SparseSpd& q_prec) {
  const Index p = p0.dim();
  require(q_mean.size() == p && q_prec.dim() == p && p0.cov.rows() == p, ErrorCode::dimension_mismatch,
          "KLD: dimensions differ");
  const DenseFactor fp = factor_dense(p0.cov, "reference covariance");
  const CholeskyFactor fq = cholesky(q_prec);
  const VectorXd delta = q_mean - p0.mean;
  const double quad = delta.dot(q_prec.multiply(delta).col(0));
  return finish(quad, trace_product(q_prec, p0.cov), -fq.log_determinant(), fp.log_det, p);
}

KldReport gaussian_kld(const GaussianOracle& p0, const VectorXd& q_mean, const MatrixXd& q_cov) {
  return gaussian_kld_dense(p0.mean, p0.cov, q_mean, q_cov);
}

KldReport gaussian_kld_reverse(const GaussianOracle& p0, const VectorXd& q_mean, const SparseSpd& q_prec) {
  const Index p = p0.dim();
  require(q_mean.size() == p && q_prec.dim() == p, ErrorCode::dimension_mismatch, "KLD: dimensions differ");
  const CholeskyFactor fq = cholesky(q_prec);
  const MatrixXd q_cov = fq.solve(MatrixXd::Identity(p, p));
  return gaussian_kld_dense(q_mean, q_cov, p0.mean, p0.cov);
}

KldReport gaussian_kld_dense(const VectorXd& p_mean, const MatrixXd& p_cov, const VectorXd& q_mean, const MatrixXd& q_cov) {
  const Index p = p_mean.size();
  require(p_cov.rows() == p && p_cov.cols() == p && q_mean.size() == p && q_cov.rows() == p && q_cov.cols() == p,
          ErrorCode::dimension_mismatch, "KLD: dimensions differ");
  const DenseFactor fp = factor_dense(p_cov, "reference covariance");
  const DenseFactor fq = factor_dense(q_cov, "approximating covariance");
  const VectorXd delta = q_mean - p_mean;
  const double quad = delta.dot(fq.llt.solve(delta));
  const double trace = fq.llt.solve(p_cov).trace();
  return finish(quad, trace, fq.log_det, fp.log_det, p);
}

GaussianOracle condition_gaussian(const GaussianOracle& prior, const MatrixXd& h, const MatrixXd& noise_cov,
                                  const VectorXd& d) {
  const Index p = prior.dim();
  const Index m = h.rows();
  require(h.cols() == p && noise_cov.rows() == m && noise_cov.cols() == m && d.size() == m,
          ErrorCode::dimension_mismatch, "conditioning: dimensions differ");
  GaussianOracle post;
  if (m == 0) {
    post.mean = prior.mean;
    post.cov = prior.cov;
    return post;
  }
  const MatrixXd sh = prior.cov * h.transpose();
  const MatrixXd s = h * sh + noise_cov;
  const Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) fail(ErrorCode::not_positive_definite, "innovation covariance is not positive definite");
  const MatrixXd gain_t = llt.solve(sh.transpose());  // K^T
  post.mean = prior.mean + gain_t.transpose() * (d - h * prior.mean);
  post.cov = prior.cov - sh * gain_t;
  post.cov = 0.5 * (post.cov + post.cov.transpose()).eval();
  return post;
}

CanonicalPosterior condition_precision(const VectorXd& mean, const SparseSpd& prec, const SparseMatrix& h,
                                       const SparseSpd& noise_prec, const VectorXd& d) {
  require(h.cols() == prec.dim() && h.rows() == noise_prec.dim() && d.size() == h.rows() && mean.size() == prec.dim(),
          ErrorCode::dimension_mismatch, "conditioning: dimensions differ");
  const Eigen::SparseMatrix<double> hc(h);
  const Eigen::SparseMatrix<double> ht = hc.transpose();
  const Eigen::SparseMatrix<double> info = ht * noise_prec.to_full() * hc;
  CanonicalPosterior post{VectorXd(), prec + SparseSpd::from_full(info)};
  const VectorXd eta = prec.multiply(mean).col(0) + ht * noise_prec.multiply(d).col(0);
  post.mean = solve_spd(post.prec, eta);
  return post;
}

std::vector<NllPoint> nll_curve(const Ensemble& train, const Ensemble& test, std::span<const CIGraph> graphs,
                                KrFitOptions options) {
  std::vector<NllPoint> curve;
  if (graphs.empty()) return curve;
  if (!options.cholesky_order) options.cholesky_order = fill_reducing_order(graphs.front());
  for (const CIGraph& g : graphs) {
    const KRMap map = fit_affine_kr(train, g, options);
    const SparseSpd prec = unwrap_precision(map);
    curve.push_back({gaussian_nll(train, prec, map.mean), gaussian_nll(test, prec, map.mean), g.edge_count()});
  }
  return curve;
}

Index argmin_test(const std::vector<NllPoint>& curve) {
  Index best = -1;
  double value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (curve[k].test < value) {
      value = curve[k].test;
      best = static_cast<Index>(k);
    }
  }
  return best;
}

UpdateSummary update_summary(const Ensemble& prior, const Ensemble& posterior) {
  require(prior.members() == posterior.members() && prior.dim() == posterior.dim(), ErrorCode::dimension_mismatch,
          "update summary: ensemble shapes differ");
  UpdateSummary s;
  s.mean_update = posterior.mean() - prior.mean();
  const VectorXd v0 = prior.anomalies().colwise().squaredNorm().transpose();
  const VectorXd v1 = posterior.anomalies().colwise().squaredNorm().transpose();
  s.variance_ratio.resize(prior.dim());
  for (Index j = 0; j < prior.dim(); ++j) s.variance_ratio[j] = v0[j] > 0.0 ? v1[j] / v0[j] : (v1[j] > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  return s;
}

}  // namespace enif
