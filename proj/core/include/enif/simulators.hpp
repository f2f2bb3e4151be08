#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "enif/ensemble.hpp"
#include "enif/graph.hpp"
#include "enif/sparse.hpp"

namespace enif {

/// Exact Gaussian law of a simulator, for evaluation only.
struct GaussianOracle {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::optional<SparseSpd> prec;

  Index dim() const noexcept { return mean.size(); }
};

/// Stationary AR-1 u_t = phi u_{t-1} + e_t with Var(e_t) = innovation_variance.
/// Covariance innovation_variance * phi^|i-j| / (1 - phi^2); tridiagonal precision.
/// Throws NonStationary if |phi| >= 1.
GaussianOracle ar1_oracle(Index p, double phi, double innovation_variance = 1.0);

/// Draws n paths by running the recursion from the stationary law. Member i uses stream i.
Ensemble ar1_sample(Index p, double phi, Index n, std::uint64_t seed, double innovation_variance = 1.0);

/// Gain of the exact conditional of a Matern-1 (Ornstein-Uhlenbeck) field with covariance
/// (kappa/2) exp(-|h|/kappa) given u(obs_position) + N(0, sigma_eps^2):
/// kappa exp(-|x - obs_position| / kappa) / (kappa + 2 sigma_eps^2) per position x.
Eigen::VectorXd matern1_exact_gain(double kappa, double sigma_eps, const Eigen::VectorXd& positions,
                                   double obs_position);

/// Euler-Maruyama discretisation of dX = -X/kappa dt + dW on `steps` equally spaced points.
struct OuEuler {
  double phi;                 ///< 1 - dt/kappa
  double innovation_variance; ///< dt
  GaussianOracle oracle;      ///< AR-1 law implied by the scheme
};

/// Throws UnstableStep unless 0 < dt <= kappa.
OuEuler ou_euler_model(double kappa, double dt, Index steps);
Ensemble ou_euler_sample(double kappa, double dt, Index steps, Index n, std::uint64_t seed);

/// Exact stationary OU law on the grid t_k = k dt: covariance (kappa/2) exp(-dt |i-j| / kappa).
GaussianOracle ou_analytic_oracle(double kappa, double dt, Index steps);

/// Lorenz-96: dx_j/dt = (x_{j+1} - x_{j-2}) x_{j-1} - x_j + F with cyclic indices.
Eigen::VectorXd lorenz96_tendency(const Eigen::VectorXd& x, double forcing);

/// Integrates every member of `init` (n x m) to t_end with fixed step dt (the last step is
/// shortened if t_end is not a multiple of dt). Throws NonFinite on blow-up.
Ensemble lorenz96_integrate(const Ensemble& init, double forcing, double dt, double t_end, IntegratorScheme scheme);

/// n x m initial states 0.01 * z.
Ensemble lorenz96_initial(Index n, Index m, std::uint64_t seed, double scale = 0.01);

/// Zero-mean field on the cell centres of a rows x cols grid over the unit square with
/// correlation exp(-|| diag(1/range) R(angle)^T h ||), i.e. range_x along the direction at
/// `angle` radians from the x axis and range_y across it. Cell (r, c) has index r * cols + c.
struct GrfModel {
  Index rows = 10;
  Index cols = 10;
  double range_x = 0.3;
  double range_y = 0.1;
  double angle = 0.0;
};

inline constexpr Index grf_oracle_limit = 4096;

double grf_correlation(const GrfModel& model, double hx, double hy);
/// Throws GridTooLargeForOracle above grf_oracle_limit cells.
Eigen::MatrixXd grf_covariance(const GrfModel& model);
GaussianOracle grf_oracle(const GrfModel& model);

/// Exact sampler from a dense covariance, reusable across seeds.
class GaussianSampler {
 public:
  GaussianSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);
  /// Member i is mean + L z_i with z_i drawn from stream i.
  Ensemble sample(Index n, std::uint64_t seed) const;
  Index dim() const noexcept { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
};

Ensemble grf_sample(const GrfModel& model, Index n, std::uint64_t seed);
Ensemble sample_gaussian(const GaussianOracle& oracle, Index n, std::uint64_t seed);

}  // namespace enif
