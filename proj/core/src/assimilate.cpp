#include "enif/assimilate.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "enif/error.hpp"
#include "enif/random.hpp"

namespace enif {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_observation(const Ensemble& prior, const ObservationSpec& obs) {
  const Index n = prior.members();
  const Index m = obs.size();
  require(obs.responses.rows() == n && obs.responses.cols() == m, ErrorCode::dimension_mismatch,
          "responses must be n x m");
  require(obs.noise_draws.rows() == n && obs.noise_draws.cols() == m, ErrorCode::dimension_mismatch,
          "noise draws must be n x m");
  require(obs.noise_precision.dim() == m, ErrorCode::dimension_mismatch, "noise precision must be m x m");
  if (obs.h) {
    require(obs.h->rows() == m && obs.h->cols() == prior.dim(), ErrorCode::dimension_mismatch,
            "observation operator must be m x p");
  }
}

Eigen::SparseMatrix<double> col_major(const SparseMatrix& h) { return Eigen::SparseMatrix<double>(h); }

}  // namespace

MatrixXd draw_observation_noise(const SparseSpd& noise_precision, Index n, std::uint64_t seed) {
  const Index m = noise_precision.dim();
  if (m == 0) return MatrixXd(n, 0);
  const CholeskyFactor f = cholesky(noise_precision);
  const MatrixXd z = standard_normal_rows(n, m, seed);
  return f.inverse_sqrt_transpose(z.transpose()).transpose();
}

ObservationSpec linear_observation(const Ensemble& prior, SparseMatrix h, VectorXd d, SparseSpd noise_precision,
                                   std::uint64_t seed) {
  ObservationSpec obs;
  obs.responses = prior.data() * SparseMatrix(h.transpose());
  obs.noise_draws = draw_observation_noise(noise_precision, prior.members(), seed);
  obs.d = std::move(d);
  obs.h = std::move(h);
  obs.noise_precision = std::move(noise_precision);
  check_observation(prior, obs);
  return obs;
}

UpdateResult enif_update(const Ensemble& prior, const SparseSpd& prior_precision, const ObservationSpec& obs,
                         const EnifOptions& options) {
  const Index p = prior.dim();
  const Index m = obs.size();
  require(prior_precision.dim() == p, ErrorCode::dimension_mismatch, "prior precision must be p x p");
  check_observation(prior, obs);

  UpdateResult result;
  if (m == 0) {
    result.posterior = prior;
    result.posterior_precision = prior_precision;
    result.h = SparseMatrix(0, p);
    result.diagnostics = update_summary(prior, prior);
    return result;
  }

  SparseSpd residual_precision;
  SparseMatrix h;
  if (options.h_method == HMethod::known) {
    require(obs.h.has_value(), ErrorCode::invalid_argument, "known-H update needs an observation operator");
    h = *obs.h;
    residual_precision = obs.noise_precision;
  } else {
    const HEstimate est = estimate_H(prior.data(), obs.responses, options.h_method, nullptr, options.lasso);
    h = est.H;
    const VectorXd noise_var = cholesky(obs.noise_precision).solve(MatrixXd::Identity(m, m)).diagonal();
    residual_precision = SparseSpd::diagonal((est.residual_variance + noise_var).cwiseInverse());
  }

  const Eigen::SparseMatrix<double> hc = col_major(h);
  const Eigen::SparseMatrix<double> ht = hc.transpose();
  const MatrixXd u = prior.data().transpose();  // p x n
  MatrixXd eta = prior_precision.multiply(u);
  // d - r_i with r_i = y_i - H u_i + e_i, one column per member.
  const MatrixXd r = (obs.responses + obs.noise_draws).transpose() - hc * u;
  const MatrixXd adjusted = (-r).colwise() + obs.d;
  eta += ht * residual_precision.multiply(adjusted);

  const Eigen::SparseMatrix<double> info = ht * residual_precision.to_full() * hc;
  SparseSpd posterior_precision = prior_precision + SparseSpd::from_full(info);
  const CholeskyFactor factor = cholesky(posterior_precision);
  result.posterior = Ensemble(factor.solve(eta).transpose());
  result.posterior_precision = std::move(posterior_precision);
  result.h = std::move(h);
  result.diagnostics = update_summary(prior, result.posterior);
  return result;
}

UpdateResult smoother_update(const Ensemble& prior, const SparseSpd& prior_precision, const ObservationSpec& obs,
                             const EnifOptions& options) {
  return enif_update(prior, prior_precision, obs, options);
}

UpdateResult enif_mda(const Ensemble& prior, const SparseSpd& prior_precision, const ObservationSpec& obs,
                      const MdaOptions& options) {
  require(!options.alphas.empty(), ErrorCode::weights_not_normalised, "MDA needs at least one weight");
  double total = 0.0;
  for (double a : options.alphas) {
    require(a > 0.0, ErrorCode::weights_not_normalised, "MDA weights must be positive");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    fail(ErrorCode::weights_not_normalised, "MDA weights sum to " + std::to_string(total) + ", not 1");
  }
  check_observation(prior, obs);
  require(options.forward || obs.h.has_value(), ErrorCode::invalid_argument,
          "MDA needs a forward model or a known observation operator");

  Ensemble current = prior;
  SparseSpd precision = prior_precision;
  ObservationSpec step = obs;
  std::optional<SparseMatrix> last_h;
  for (std::size_t k = 0; k < options.alphas.size(); ++k) {
    const double alpha = options.alphas[k];
    step.noise_precision = obs.noise_precision.scaled(alpha);
    if (k == 0) {
      step.noise_draws = obs.noise_draws / std::sqrt(alpha);
    } else {
      step.noise_draws = draw_observation_noise(step.noise_precision, prior.members(), derive_seed(options.seed, k));
      step.responses = options.forward ? options.forward(current)
                                       : MatrixXd(current.data() * SparseMatrix(obs.h->transpose()));
    }
    UpdateResult r = enif_update(current, precision, step, options.enif);
    current = std::move(r.posterior);
    precision = std::move(*r.posterior_precision);
    last_h = std::move(r.h);
  }

  UpdateResult result;
  result.posterior = std::move(current);
  result.posterior_precision = std::move(precision);
  result.h = std::move(last_h);
  result.diagnostics = update_summary(prior, result.posterior);
  return result;
}

Localisation Localisation::distance(double c, MatrixXd distances) {
  Localisation l;
  l.kind = Kind::distance;
  l.c = c;
  l.distances = std::move(distances);
  return l;
}

Localisation Localisation::adaptive(std::optional<double> threshold) {
  Localisation l;
  l.kind = Kind::adaptive;
  l.threshold = threshold;
  return l;
}

MatrixXd enkf_gain(const Ensemble& prior, const ObservationSpec& obs, const EnkfOptions& options) {
  const Index n = prior.members();
  const Index p = prior.dim();
  const Index m = obs.size();
  require(n >= 2, ErrorCode::invalid_argument, "ensemble update needs at least two members");
  check_observation(prior, obs);
  if (m == 0) return MatrixXd(p, 0);

  const MatrixXd& u = prior.data();
  MatrixXd sigma_ud;
  MatrixXd sigma_d;
  MatrixXd predicted;  // the response ensemble whose correlation drives adaptive localisation
  if (options.noise == NoiseConvention::analytic) {
    predicted = obs.responses;
    sigma_ud = sample_cross_covariance(u, predicted);
    sigma_d = sample_covariance(predicted) + cholesky(obs.noise_precision).solve(MatrixXd::Identity(m, m));
  } else {
    predicted = obs.responses + obs.noise_draws;
    sigma_ud = sample_cross_covariance(u, predicted);
    sigma_d = sample_covariance(predicted);
  }

  const Localisation& loc = options.localisation;
  if (loc.kind == Localisation::Kind::distance) {
    require(loc.distances.rows() == p && loc.distances.cols() == m, ErrorCode::dimension_mismatch,
            "localisation distances must be p x m");
    require(loc.c >= 0.0, ErrorCode::invalid_argument, "localisation strength must be non-negative");
    sigma_ud = sigma_ud.cwiseProduct((-loc.c * loc.distances.array().square()).exp().matrix());
  }

  Eigen::LLT<MatrixXd> llt(sigma_d);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const auto& l = llt.matrixLLT();
    const double top = sigma_d.diagonal().cwiseAbs().maxCoeff();
    for (Index i = 0; i < m && ok; ++i) ok = l(i, i) * l(i, i) > 1e-12 * top;
  }
  if (!ok) {
    fail(ErrorCode::singular_innovation_covariance,
         "innovation covariance is singular (" + std::to_string(m) + " observations, " + std::to_string(n) + " members)");
  }
  MatrixXd gain = llt.solve(sigma_ud.transpose()).transpose();

  if (loc.kind == Localisation::Kind::adaptive) {
    const double tau = loc.threshold.value_or(3.0 / std::sqrt(static_cast<double>(n)));
    const VectorXd su = sample_covariance(u).diagonal().cwiseSqrt();
    const VectorXd sy = sample_covariance(predicted).diagonal().cwiseSqrt();
    const MatrixXd cross = sample_cross_covariance(u, predicted);
    for (Index j = 0; j < p; ++j) {
      for (Index k = 0; k < m; ++k) {
        const double denom = su[j] * sy[k];
        const double corr = denom > 0.0 ? cross(j, k) / denom : 0.0;
        if (std::abs(corr) < tau) gain(j, k) = 0.0;
      }
    }
  }
  return gain;
}

UpdateResult enkf_update(const Ensemble& prior, const ObservationSpec& obs, const EnkfOptions& options) {
  const MatrixXd gain = enkf_gain(prior, obs, options);
  UpdateResult result;
  if (obs.size() == 0) {
    result.posterior = prior;
  } else {
    const MatrixXd innovation = (-(obs.responses + obs.noise_draws)).rowwise() + obs.d.transpose();  // n x m
    result.posterior = Ensemble(prior.data() + innovation * gain.transpose());
  }
  if (obs.h) result.h = obs.h;
  result.diagnostics = update_summary(prior, result.posterior);
  return result;
}

}  // namespace enif
