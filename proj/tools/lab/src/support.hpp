#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "enif/enif.hpp"

namespace lab::detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  return 0.5 * (upper + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

/// 1 x p operator picking the last coordinate.
inline enif::SparseMatrix endpoint_operator(enif::Index p) {
  enif::SparseMatrix h(1, p);
  h.insert(0, p - 1) = 1.0;
  h.makeCompressed();
  return h;
}

/// KLD that reports a singular approximating model as +inf instead of throwing.
template <class Fn>
double kld_or_infinity(Fn&& fn) {
  try {
    return fn();
  } catch (const enif::Error& e) {
    if (e.code() != enif::ErrorCode::not_positive_definite) throw;
    return std::numeric_limits<double>::infinity();
  }
}

/// Exact Gaussian truth and the observation drawn from it, shared by the OU experiments.
struct OuProblem {
  enif::GaussianOracle posterior;
  enif::SparseMatrix h;
  Eigen::MatrixXd noise_cov;
  enif::SparseSpd noise_precision;
  Eigen::VectorXd d;
};

OuProblem ou_problem(const enif::GaussianOracle& truth, double noise_variance, std::uint64_t seed);

/// Chain-graph EnIF model of the prior conditioned on the problem's observation; total KLD.
double enif_posterior_kld(const enif::Ensemble& prior, const OuProblem& problem);

/// Gaussian with the given covariance conditioned on the observation; total KLD.
double dense_posterior_kld(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, const OuProblem& problem);

}  // namespace lab::detail
