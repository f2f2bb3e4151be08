#include "enif/simulators.hpp"

#include <cmath>
#include <string>

#include "enif/error.hpp"
#include "enif/random.hpp"

namespace enif {

using Eigen::MatrixXd;
using Eigen::VectorXd;

GaussianOracle ar1_oracle(Index p, double phi, double innovation_variance) {
  require(p >= 1, ErrorCode::invalid_argument, "AR-1 needs at least one time point");
  require(innovation_variance > 0.0, ErrorCode::invalid_argument, "innovation variance must be positive");
  if (!(std::abs(phi) < 1.0)) fail(ErrorCode::non_stationary, "AR-1 with |phi| >= 1 has no stationary law");
  const double s2 = innovation_variance;
  GaussianOracle o;
  o.mean = VectorXd::Zero(p);
  o.cov.resize(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) o.cov(i, j) = s2 * std::pow(phi, static_cast<double>(std::abs(i - j))) / (1.0 - phi * phi);
  }
  std::vector<Triplet> t;
  for (Index i = 0; i < p; ++i) {
    const bool interior = i > 0 && i + 1 < p;
    const double diag = p == 1 ? 1.0 - phi * phi : (interior ? 1.0 + phi * phi : 1.0);
    t.push_back({i, i, diag / s2});
    if (i + 1 < p && phi != 0.0) t.push_back({i + 1, i, -phi / s2});
  }
  o.prec = SparseSpd::from_triplets(p, t);
  return o;
}

Ensemble ar1_sample(Index p, double phi, Index n, std::uint64_t seed, double innovation_variance) {
  if (!(std::abs(phi) < 1.0)) fail(ErrorCode::non_stationary, "AR-1 with |phi| >= 1 has no stationary law");
  const double sd = std::sqrt(innovation_variance);
  const double sd0 = sd / std::sqrt(1.0 - phi * phi);
  MatrixXd u(n, p);
  for (Index i = 0; i < n; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    double prev = sd0 * rng.normal();
    u(i, 0) = prev;
    for (Index t = 1; t < p; ++t) {
      prev = phi * prev + sd * rng.normal();
      u(i, t) = prev;
    }
  }
  return Ensemble(std::move(u));
}

VectorXd matern1_exact_gain(double kappa, double sigma_eps, const VectorXd& positions, double obs_position) {
  require(kappa > 0.0, ErrorCode::invalid_argument, "kappa must be positive");
  VectorXd g(positions.size());
  for (Index i = 0; i < positions.size(); ++i) {
    g[i] = kappa * std::exp(-std::abs(positions[i] - obs_position) / kappa) / (kappa + 2.0 * sigma_eps * sigma_eps);
  }
  return g;
}

OuEuler ou_euler_model(double kappa, double dt, Index steps) {
  require(kappa > 0.0, ErrorCode::invalid_argument, "kappa must be positive");
  if (!(dt > 0.0 && dt <= kappa)) {
    fail(ErrorCode::unstable_step, "Euler step dt = " + std::to_string(dt) + " outside (0, kappa]");
  }
  OuEuler m;
  m.phi = 1.0 - dt / kappa;
  m.innovation_variance = dt;
  m.oracle = ar1_oracle(steps, m.phi, dt);
  return m;
}

Ensemble ou_euler_sample(double kappa, double dt, Index steps, Index n, std::uint64_t seed) {
  const OuEuler m = ou_euler_model(kappa, dt, steps);
  return ar1_sample(steps, m.phi, n, seed, m.innovation_variance);
}

GaussianOracle ou_analytic_oracle(double kappa, double dt, Index steps) {
  require(kappa > 0.0 && dt > 0.0, ErrorCode::invalid_argument, "kappa and dt must be positive");
  // Sampled on an even grid the OU process is AR-1 with phi = exp(-dt/kappa).
  const double phi = std::exp(-dt / kappa);
  return ar1_oracle(steps, phi, 0.5 * kappa * (1.0 - phi * phi));
}

VectorXd lorenz96_tendency(const VectorXd& x, double forcing) {
  const Index m = x.size();
  VectorXd d(m);
  for (Index j = 0; j < m; ++j) {
    const double xp1 = x[(j + 1) % m];
    const double xm1 = x[(j + m - 1) % m];
    const double xm2 = x[(j + m - 2) % m];
    d[j] = (xp1 - xm2) * xm1 - x[j] + forcing;
  }
  return d;
}

namespace {

VectorXd l96_step(const VectorXd& x, double forcing, double h, IntegratorScheme scheme) {
  if (scheme == IntegratorScheme::euler) return x + h * lorenz96_tendency(x, forcing);
  const VectorXd k1 = lorenz96_tendency(x, forcing);
  const VectorXd k2 = lorenz96_tendency(x + 0.5 * h * k1, forcing);
  const VectorXd k3 = lorenz96_tendency(x + 0.5 * h * k2, forcing);
  const VectorXd k4 = lorenz96_tendency(x + h * k3, forcing);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Ensemble lorenz96_integrate(const Ensemble& init, double forcing, double dt, double t_end, IntegratorScheme scheme) {
  require(init.dim() >= 4, ErrorCode::too_few_states, "Lorenz-96 needs at least 4 states");
  require(dt > 0.0 && t_end >= 0.0, ErrorCode::invalid_argument, "Lorenz-96 needs dt > 0 and t_end >= 0");
  const auto full_steps = static_cast<long long>(std::floor(t_end / dt + 1e-9));
  const double rest = t_end - static_cast<double>(full_steps) * dt;
  MatrixXd out(init.members(), init.dim());
  for (Index i = 0; i < init.members(); ++i) {
    VectorXd x = init.data().row(i).transpose();
    for (long long s = 0; s < full_steps; ++s) x = l96_step(x, forcing, dt, scheme);
    if (rest > 1e-12 * dt) x = l96_step(x, forcing, rest, scheme);
    if (!x.allFinite()) fail(ErrorCode::non_finite, "Lorenz-96 integration diverged for member " + std::to_string(i));
    out.row(i) = x.transpose();
  }
  return Ensemble(std::move(out));
}

Ensemble lorenz96_initial(Index n, Index m, std::uint64_t seed, double scale) {
  return Ensemble(scale * standard_normal_rows(n, m, seed));
}

double grf_correlation(const GrfModel& model, double hx, double hy) {
  const double c = std::cos(model.angle);
  const double s = std::sin(model.angle);
  // Coordinates of h along and across the principal direction.
  const double along = c * hx + s * hy;
  const double across = -s * hx + c * hy;
  return std::exp(-std::hypot(along / model.range_x, across / model.range_y));
}

MatrixXd grf_covariance(const GrfModel& model) {
  require(model.rows >= 1 && model.cols >= 1, ErrorCode::invalid_argument, "grid needs positive dimensions");
  require(model.range_x > 0.0 && model.range_y > 0.0, ErrorCode::invalid_argument, "ranges must be positive");
  const Index p = model.rows * model.cols;
  if (p > grf_oracle_limit) {
    fail(ErrorCode::grid_too_large_for_oracle,
         std::to_string(p) + " cells exceeds the dense oracle limit of " + std::to_string(grf_oracle_limit));
  }
  MatrixXd cov(p, p);
  for (Index a = 0; a < p; ++a) {
    const double xa = (static_cast<double>(a % model.cols) + 0.5) / static_cast<double>(model.cols);
    const double ya = (static_cast<double>(a / model.cols) + 0.5) / static_cast<double>(model.rows);
    for (Index b = a; b < p; ++b) {
      const double xb = (static_cast<double>(b % model.cols) + 0.5) / static_cast<double>(model.cols);
      const double yb = (static_cast<double>(b / model.cols) + 0.5) / static_cast<double>(model.rows);
      cov(a, b) = cov(b, a) = grf_correlation(model, xb - xa, yb - ya);
    }
  }
  return cov;
}

GaussianOracle grf_oracle(const GrfModel& model) {
  GaussianOracle o;
  o.cov = grf_covariance(model);
  o.mean = VectorXd::Zero(o.cov.rows());
  return o;
}

GaussianSampler::GaussianSampler(VectorXd mean, const MatrixXd& cov) : mean_(std::move(mean)) {
  require(cov.rows() == mean_.size() && cov.cols() == mean_.size(), ErrorCode::dimension_mismatch,
          "sampler: mean/covariance sizes differ");
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) fail(ErrorCode::not_positive_definite, "sampler covariance is not positive definite");
  factor_ = llt.matrixL();
}

Ensemble GaussianSampler::sample(Index n, std::uint64_t seed) const {
  const MatrixXd z = standard_normal_rows(n, dim(), seed);
  MatrixXd u = z * factor_.transpose();
  u.rowwise() += mean_.transpose();
  return Ensemble(std::move(u));
}

Ensemble grf_sample(const GrfModel& model, Index n, std::uint64_t seed) {
  const GaussianOracle o = grf_oracle(model);
  return GaussianSampler(o.mean, o.cov).sample(n, seed);
}

Ensemble sample_gaussian(const GaussianOracle& oracle, Index n, std::uint64_t seed) {
  return GaussianSampler(oracle.mean, oracle.cov).sample(n, seed);
}

}  // namespace enif
