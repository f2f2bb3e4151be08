#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "enif/ensemble.hpp"
#include "enif/evaluate.hpp"
#include "enif/regress.hpp"
#include "enif/sparse.hpp"

namespace enif {

/// Observation d = h(u) + e with e ~ N(0, noise_precision^{-1}).
struct ObservationSpec {
  Eigen::VectorXd d;
  /// Responses y^(i) = h(u^(i)), n x m.
  Eigen::MatrixXd responses;
  /// Linear observation operator when known (m x p).
  std::optional<SparseMatrix> h;
  SparseSpd noise_precision;
  /// Perturbations e^(i), n x m.
  Eigen::MatrixXd noise_draws;

  Index size() const noexcept { return d.size(); }
};

/// n draws (rows) from N(0, noise_precision^{-1}); row i uses stream i of `seed`.
Eigen::MatrixXd draw_observation_noise(const SparseSpd& noise_precision, Index n, std::uint64_t seed);

/// Observation of the prior through a known linear operator: responses = U H^T.
ObservationSpec linear_observation(const Ensemble& prior, SparseMatrix h, Eigen::VectorXd d, SparseSpd noise_precision,
                                   std::uint64_t seed);

struct UpdateResult {
  Ensemble posterior;
  std::optional<SparseSpd> posterior_precision;
  /// Observation operator used by the update (estimated or given).
  std::optional<SparseMatrix> h;
  UpdateSummary diagnostics;
};

struct EnifOptions {
  /// How to obtain H; `known` requires obs.h.
  HMethod h_method = HMethod::known;
  MonotoneLassoOptions lasso;
};

/// Information-filter update in canonical form:
///   eta_i = Lambda u_i,  r_i = y_i - H u_i + e_i,  eta_i += H^T Lambda_r (d - r_i),
///   Lambda_post = Lambda + H^T Lambda_r H,  u_i = Lambda_post^{-1} eta_i.
/// Lambda_r = noise precision for a known H, otherwise the diagonal precision of regression
/// residual variance plus noise variance per response.
UpdateResult enif_update(const Ensemble& prior, const SparseSpd& prior_precision, const ObservationSpec& obs,
                         const EnifOptions& options = {});

/// Stacked-in-time smoothing update; identical to enif_update on the stacked state.
UpdateResult smoother_update(const Ensemble& prior, const SparseSpd& prior_precision, const ObservationSpec& obs,
                             const EnifOptions& options = {});

struct MdaOptions {
  /// Positive weights summing to one; step k assimilates with noise precision alpha_k Lambda_e.
  std::vector<double> alphas{1.0};
  /// Seed for the perturbations of steps after the first.
  std::uint64_t seed = 0;
  /// Recomputes responses between steps; defaults to the linear map U H^T.
  std::function<Eigen::MatrixXd(const Ensemble&)> forward;
  EnifOptions enif;
};

/// Multiple data assimilation. Step 1 reuses obs.noise_draws scaled by 1/sqrt(alpha_1); later
/// steps draw fresh noise. The precision is carried between steps, so in the linear case the
/// final precision equals the single-step posterior precision.
UpdateResult enif_mda(const Ensemble& prior, const SparseSpd& prior_precision, const ObservationSpec& obs,
                      const MdaOptions& options);

/// Sample-covariance Kalman update u_i + K (d - y_i - e_i).
///
/// `analytic` uses Sigma_ud = cov(U, Y) and Sigma_d = cov(Y) + Sigma_e; `sampled` uses
/// cov(U, D) and cov(D) with D = Y + E.
enum class NoiseConvention { analytic, sampled };

struct Localisation {
  enum class Kind { none, distance, adaptive };
  Kind kind = Kind::none;
  /// Distance kernel exp(-c delta^2) applied to Sigma_ud; `distances` is p x m.
  double c = 0.0;
  Eigen::MatrixXd distances;
  /// Adaptive: zero gain entries whose |corr(u_j, y_k)| falls below the threshold (default 3/sqrt(n)).
  std::optional<double> threshold;

  static Localisation none() { return {}; }
  static Localisation distance(double c, Eigen::MatrixXd distances);
  static Localisation adaptive(std::optional<double> threshold = std::nullopt);
};

struct EnkfOptions {
  Localisation localisation;
  NoiseConvention noise = NoiseConvention::analytic;
};

UpdateResult enkf_update(const Ensemble& prior, const ObservationSpec& obs, const EnkfOptions& options = {});

/// Kalman gain p x m of the ensemble update (after localisation).
Eigen::MatrixXd enkf_gain(const Ensemble& prior, const ObservationSpec& obs, const EnkfOptions& options = {});

}  // namespace enif
