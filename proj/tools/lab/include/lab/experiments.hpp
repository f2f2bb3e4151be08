#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "enif/enif.hpp"
#include "lab/config.hpp"
#include "lab/output.hpp"

namespace lab {

using enif::Index;

/// Settings shared by every experiment.
struct Common {
  std::uint64_t seed = 1;
  /// Worker threads for independent tasks; 0 uses every core.
  unsigned threads = 0;
};

// Resolution sweep: OU prior on a fixed interval observed at its endpoint. For each resolution
// the Euler-scheme law, a chain-graph EnIF fit and the sample-covariance (ES) fit are each
// conditioned on the observation and compared to the analytical posterior by average KLD.
struct ResolutionSweepParams {
  double kappa = 1.0;
  Index members = 1000;
  std::vector<Index> resolutions{16, 32, 64, 128, 256};
  /// Length of the time interval; dt = length / (resolution - 1) must not exceed kappa.
  double domain_length = 14.25;
  double noise_variance = 1.0;
  Index replicates = 1;
};

struct ResolutionRow {
  Index resolution = 0;
  double dt = 0.0;
  double kld_euler = 0.0;
  double kld_enif = 0.0;
  double kld_es = 0.0;
};

struct ResolutionSweepResult {
  std::vector<ResolutionRow> rows;
};

ResolutionSweepParams parse_resolution_sweep(ParamReader& r);
ResolutionSweepResult run_resolution_sweep(const ResolutionSweepParams& params, const Common& common, Sink& sink);

// Dependence strength: AR-1 prior with a far-away endpoint observation; EnIF and ES member
// updates are compared to the exact update that uses the true prior covariance.
struct DependenceParams {
  std::vector<double> phis{0.0, 0.5, 0.9, 0.95};
  Index dim = 100;
  Index members = 50;
  double observation = 20.0;
  double noise_variance = 1.0;
  Index replicates = 20;
};

struct DependenceRow {
  double phi = 0.0;
  /// Medians over replicates of the root-mean-square (over members) L2 distance to the exact update.
  double deviation_enif = 0.0;
  double deviation_es = 0.0;
  /// Same, restricted to the non-endpoint coordinates.
  double interior_deviation_enif = 0.0;
  double interior_deviation_es = 0.0;
  /// First member of the first replicate: prior, exact, EnIF and ES.
  Eigen::MatrixXd first_member;  // dim x 4
};

struct DependenceResult {
  std::vector<DependenceRow> rows;
};

DependenceParams parse_dependence(ParamReader& r);
DependenceResult run_dependence_strength(const DependenceParams& params, const Common& common, Sink& sink);

// Localisation sweep: the resolution-sweep OU setup at one resolution; the sample covariance is
// tapered by exp(-c delta^2) over a log-spaced grid of c, and each tapered Gaussian is
// conditioned on the endpoint observation and scored by KLD against the analytical posterior.
struct LocalisationParams {
  double kappa = 1.0;
  Index dim = 200;
  Index members = 200;
  double domain_length = 14.25;
  double noise_variance = 1.0;
  double c_min = 1e-3;
  double c_max = 1e3;
  Index radii = 12;
  Index replicates = 1;
};

struct LocalisationResult {
  std::vector<double> c;
  /// Total KLD per c (median over replicates); +inf where the tapered model is singular.
  std::vector<double> kld_es;
  /// Untapered sample covariance (c = 0).
  double kld_vanilla = 0.0;
  double kld_enif = 0.0;
};

LocalisationParams parse_localisation(ParamReader& r);
LocalisationResult run_localisation_sweep(const LocalisationParams& params, const Common& common, Sink& sink);

// Lorenz-96 Markov order: train/test NLL of circular Markov-graph fits of increasing order on
// ensembles integrated from small random initial states.
struct LorenzParams {
  Index states = 40;
  double forcing = 8.0;
  double dt = 0.01;
  double t_end = 4.0;
  std::string scheme = "rk4";
  std::vector<Index> sizes{100, 200, 500};
  /// Test-set size; 0 means the same size as the training set.
  Index test_members = 0;
  Index max_order = 10;
  Index replicates = 1;
};

struct LorenzRun {
  Index size = 0;
  Index replicate = 0;
  std::vector<enif::NllPoint> curve;  // order k at index k - 1
  Index best_order = 0;
};

struct LorenzResult {
  std::vector<LorenzRun> runs;
};

LorenzParams parse_lorenz(ParamReader& r);
LorenzResult run_lorenz96_markov_order(const LorenzParams& params, const Common& common, Sink& sink);

// GRF update: anisotropic exponential field observed along the grid diagonal through a noisy
// response y = u + z; ES, adaptively localised ES and EnIF (lattice graph, boosted H).
struct GrfParams {
  std::vector<Index> grids{10, 32, 64};
  Index members = 100;
  double range_x = 0.3;
  double range_y = 0.1;
  double angle = 0.0;
  double response_noise_sd = 0.1;
  double noise_variance = 1.0;
  /// Cells with |row - col| <= band count as on the diagonal for the energy statistics.
  Index band = 2;
  Index replicates = 1;
  std::vector<std::string> methods{"es", "es-adaptive", "enif"};
};

struct GrfMethodResult {
  std::string method;
  /// Mean update per cell (row-major rows x cols), first replicate.
  Eigen::VectorXd mean_update;
  /// Medians over replicates.
  double off_band_energy = 0.0;
  double band_energy = 0.0;
};

struct GrfGridResult {
  Index grid = 0;
  std::vector<GrfMethodResult> methods;
  /// Boosted-H support size and true-positive fraction, medians over replicates.
  double h_support = 0.0;
  double h_true_positive = 0.0;
};

struct GrfResult {
  std::vector<GrfGridResult> grids;
};

GrfParams parse_grf(ParamReader& r);
GrfResult run_grf2d_update(const GrfParams& params, const Common& common, Sink& sink);

/// Boosted-H support statistics for a diagonal observation of one GRF sample (used by the grid runs).
struct SupportStats {
  Index support = 0;
  double true_positive = 0.0;
};
SupportStats diagonal_support(const enif::SparseMatrix& h, Index rows, Index cols);

// FEM heat demo: assembles the lumped-mass heat model on a triangulated rectangle, checks the
// Markov pattern of the space-time precision and smooths a synthetic endpoint observation.
struct FemHeatParams {
  Index nx = 8;
  Index ny = 8;
  double width = 1.0;
  double height = 1.0;
  double alpha = 1.0;
  double sigma = 1.0;
  double dt = 0.01;
  Index blocks = 4;
  Index members = 200;
  double noise_variance = 1e-4;
  double observation = 0.05;
};

struct FemHeatResult {
  double max_row_sum = 0.0;
  bool pattern_ok = false;
  Index precision_nnz = 0;
  /// Norm of the ensemble mean update and of the exact conditional mean update per time block.
  std::vector<double> update_norm;
  std::vector<double> exact_update_norm;
};

FemHeatParams parse_fem_heat(ParamReader& r);
FemHeatResult run_fem_heat_demo(const FemHeatParams& params, const Common& common, Sink& sink);

/// Experiment names accepted in configs.
const std::vector<std::string>& experiment_names();

/// Parses the config, runs the experiment into `sink` and writes its manifest.
void run_experiment(const Json& config, Sink& sink);

/// Output directory named by the config ("output", default the experiment name) under `root`.
std::filesystem::path experiment_dir(const Json& config, const std::filesystem::path& root);

}  // namespace lab
