#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "enif/ensemble.hpp"
#include "enif/graph.hpp"
#include "enif/simulators.hpp"
#include "enif/sparse.hpp"
#include "enif/transport.hpp"

namespace enif {

/// D(P || Q) = mean_term + trace_term + log_det_term with
///   mean_term    = 1/2 (mu_Q - mu_P)^T Sigma_Q^{-1} (mu_Q - mu_P)
///   trace_term   = 1/2 (tr(Sigma_Q^{-1} Sigma_P) - p)
///   log_det_term = 1/2 (log|Sigma_Q| - log|Sigma_P|)
struct KldReport {
  double total = 0.0;
  double per_variable_average = 0.0;
  double mean_term = 0.0;
  double trace_term = 0.0;
  double log_det_term = 0.0;
};

/// D(P0 || Q) for the truth P0 and Q = N(q_mean, q_prec^{-1}).
KldReport gaussian_kld(const GaussianOracle& p0, const Eigen::VectorXd& q_mean, const SparseSpd& q_prec);
/// D(P0 || Q) for Q given by a dense covariance.
KldReport gaussian_kld(const GaussianOracle& p0, const Eigen::VectorXd& q_mean, const Eigen::MatrixXd& q_cov);
/// D(Q || P0), the reverse orientation.
KldReport gaussian_kld_reverse(const GaussianOracle& p0, const Eigen::VectorXd& q_mean, const SparseSpd& q_prec);
/// Fully dense D(P || Q).
KldReport gaussian_kld_dense(const Eigen::VectorXd& p_mean, const Eigen::MatrixXd& p_cov, const Eigen::VectorXd& q_mean,
                             const Eigen::MatrixXd& q_cov);

/// Exact law of u | d for u ~ prior and d = H u + e, e ~ N(0, noise_cov).
GaussianOracle condition_gaussian(const GaussianOracle& prior, const Eigen::MatrixXd& h, const Eigen::MatrixXd& noise_cov,
                                  const Eigen::VectorXd& d);

struct CanonicalPosterior {
  Eigen::VectorXd mean;
  SparseSpd prec;
};

/// Same conditioning in precision form: Lambda + H^T Lambda_e H and the matching mean.
CanonicalPosterior condition_precision(const Eigen::VectorXd& mean, const SparseSpd& prec, const SparseMatrix& h,
                                       const SparseSpd& noise_prec, const Eigen::VectorXd& d);

struct NllPoint {
  double train = 0.0;
  double test = 0.0;
  Index edges = 0;
};

/// Fits a map per graph on `train` and scores it on both sets. Unless the options fix an
/// ordering, every fit reuses the fill-reducing order of the first graph so that nested
/// graphs give nested factor patterns.
std::vector<NllPoint> nll_curve(const Ensemble& train, const Ensemble& test, std::span<const CIGraph> graphs,
                                KrFitOptions options = {});
Index argmin_test(const std::vector<NllPoint>& curve);

struct UpdateSummary {
  Eigen::VectorXd mean_update;     ///< posterior mean - prior mean
  Eigen::VectorXd variance_ratio;  ///< posterior variance / prior variance (1 where both vanish)
};

UpdateSummary update_summary(const Ensemble& prior, const Ensemble& posterior);

}  // namespace enif
