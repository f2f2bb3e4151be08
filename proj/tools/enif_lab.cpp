// enif-lab: experiment runner and ad-hoc assimilation front end.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "enif/enif.hpp"
#include "enif/version.hpp"
#include "lab/experiments.hpp"

namespace {

using enif::Index;
namespace fs = std::filesystem;

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct RunArgs {
  std::string config;
  std::string output_root;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

struct SimulateArgs {
  std::string model = "ar1";
  Index members = 100;
  Index dim = 100;
  std::uint64_t seed = 1;
  double phi = 0.9;
  double kappa = 1.0;
  double dt = 0.1;
  double forcing = 8.0;
  double t_end = 4.0;
  std::string scheme = "rk4";
  Index rows = 10;
  Index cols = 10;
  double range_x = 0.3;
  double range_y = 0.1;
  double angle = 0.0;
  std::string out;
  std::string precision_out;
  std::string graph_out;
};

struct AssimilateArgs {
  std::string prior;
  std::string observations;
  std::string responses;
  std::string h;
  double noise_variance = 1.0;
  std::string noise_precision;
  std::string method = "enif";
  std::string h_method = "known";
  std::string graph;
  std::string graph_kind;
  std::string precision;
  std::vector<double> alphas;
  double c = 0.0;
  std::string distances;
  std::optional<double> threshold;
  std::uint64_t seed = 1;
  std::string out;
  std::string precision_out;
  std::string summary;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) enif::fail(enif::ErrorCode::io_error, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) enif::fail(enif::ErrorCode::io_error, "cannot write " + path);
  out.precision(17);
  return out;
}

int run_command(const RunArgs& args) {
  lab::Json config = lab::load_config(args.config);
  if (args.seed) config["seed"] = *args.seed;
  if (args.threads) config["threads"] = *args.threads;
  const fs::path root = args.output_root.empty() ? lab::output_root() : fs::path(args.output_root);
  const fs::path dir = lab::experiment_dir(config, root);
  lab::Sink sink(dir);
  lab::run_experiment(config, sink);
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

int simulate_command(const SimulateArgs& a) {
  if (a.out.empty()) enif::fail(enif::ErrorCode::invalid_argument, "--out is required");
  enif::Ensemble ens;
  std::optional<enif::SparseSpd> precision;
  std::optional<enif::CIGraph> graph;
  if (a.model == "ar1") {
    ens = enif::ar1_sample(a.dim, a.phi, a.members, a.seed);
    precision = enif::ar1_oracle(a.dim, a.phi).prec;
    graph = enif::chain_graph(a.dim);
  } else if (a.model == "ou") {
    const enif::OuEuler m = enif::ou_euler_model(a.kappa, a.dt, a.dim);
    ens = enif::ou_euler_sample(a.kappa, a.dt, a.dim, a.members, a.seed);
    precision = m.oracle.prec;
    graph = enif::chain_graph(a.dim);
  } else if (a.model == "lorenz96") {
    const enif::IntegratorScheme scheme =
        a.scheme == "euler" ? enif::IntegratorScheme::euler : enif::IntegratorScheme::rk4;
    if (a.scheme != "euler" && a.scheme != "rk4") enif::fail(enif::ErrorCode::invalid_argument, "--scheme must be rk4 or euler");
    ens = enif::lorenz96_integrate(enif::lorenz96_initial(a.members, a.dim, a.seed), a.forcing, a.dt, a.t_end, scheme);
    graph = enif::lorenz96_stencil_graph(a.dim, scheme);
  } else if (a.model == "grf") {
    ens = enif::grf_sample({a.rows, a.cols, a.range_x, a.range_y, a.angle}, a.members, a.seed);
    graph = enif::lattice_graph(a.rows, a.cols);
  } else {
    enif::fail(enif::ErrorCode::invalid_argument, "unknown model '" + a.model + "'");
  }
  enif::save_ensemble(a.out, ens);
  if (!a.precision_out.empty()) {
    if (!precision) enif::fail(enif::ErrorCode::invalid_argument, "model '" + a.model + "' has no sparse precision oracle");
    auto out = open_out(a.precision_out);
    enif::write_triplets(out, *precision);
  }
  if (!a.graph_out.empty()) {
    auto out = open_out(a.graph_out);
    enif::write_edge_list(out, *graph);
  }
  return 0;
}

enif::CIGraph graph_from_kind(const std::string& kind, Index p) {
  const auto colon = kind.find(':');
  const std::string name = kind.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : kind.substr(colon + 1);
  try {
    if (name == "chain") return enif::chain_graph(p);
    if (name == "complete") return enif::complete_graph(p);
    if (name == "empty") return enif::CIGraph(p);
    if (name == "circular") return enif::circular_markov_graph(p, std::stoll(arg));
    if (name == "lattice") {
      const auto x = arg.find('x');
      const Index rows = std::stoll(arg.substr(0, x));
      const Index cols = std::stoll(arg.substr(x + 1));
      if (rows * cols != p) enif::fail(enif::ErrorCode::dimension_mismatch, "lattice size differs from the state dimension");
      return enif::lattice_graph(rows, cols);
    }
  } catch (const std::logic_error&) {
    // std::stoll failures fall through to the message below
  }
  enif::fail(enif::ErrorCode::invalid_argument,
             "--graph-kind must be chain, complete, empty, circular:K or lattice:RxC (got '" + kind + "')");
}

int assimilate_command(const AssimilateArgs& a) {
  const enif::Ensemble prior = enif::load_ensemble(a.prior);
  const Index n = prior.members();
  const Index p = prior.dim();

  const Eigen::MatrixXd d_raw = enif::load_matrix_csv(a.observations);
  const Eigen::VectorXd d = d_raw.reshaped<Eigen::RowMajor>();
  const Index m = d.size();

  enif::ObservationSpec obs;
  obs.d = d;
  if (!a.h.empty()) {
    auto in = open_in(a.h);
    obs.h = enif::read_matrix_triplets(in);
  }
  if (!a.responses.empty()) {
    obs.responses = enif::load_matrix_csv(a.responses);
  } else if (obs.h) {
    obs.responses = prior.data() * enif::SparseMatrix(obs.h->transpose());
  } else {
    enif::fail(enif::ErrorCode::invalid_argument, "need --responses or --operator");
  }
  if (!a.noise_precision.empty()) {
    auto in = open_in(a.noise_precision);
    obs.noise_precision = enif::read_spd_triplets(in);
  } else {
    if (!(a.noise_variance > 0.0)) enif::fail(enif::ErrorCode::invalid_argument, "--noise-variance must be positive");
    obs.noise_precision = enif::SparseSpd::diagonal(Eigen::VectorXd::Constant(m, 1.0 / a.noise_variance));
  }
  obs.noise_draws = enif::draw_observation_noise(obs.noise_precision, n, a.seed);

  enif::HMethod h_method = enif::HMethod::known;
  if (a.h_method == "lasso") {
    h_method = enif::HMethod::monotone_lasso;
  } else if (a.h_method == "lls") {
    h_method = enif::HMethod::lls;
  } else if (a.h_method != "known") {
    enif::fail(enif::ErrorCode::invalid_argument, "--h-method must be known, lasso or lls");
  }

  enif::UpdateResult result;
  if (a.method == "enif" || a.method == "enif-mda") {
    enif::SparseSpd prec;
    if (!a.precision.empty()) {
      auto in = open_in(a.precision);
      prec = enif::read_spd_triplets(in);
    } else {
      enif::CIGraph g;
      if (!a.graph.empty()) {
        auto in = open_in(a.graph);
        g = enif::read_edge_list(in);
      } else if (!a.graph_kind.empty()) {
        g = graph_from_kind(a.graph_kind, p);
      } else {
        enif::fail(enif::ErrorCode::invalid_argument, "EnIF needs --graph, --graph-kind or --precision");
      }
      prec = enif::unwrap_precision(enif::fit_affine_kr(prior, g));
    }
    const enif::EnifOptions opts{h_method, {}};
    if (a.method == "enif") {
      result = enif::enif_update(prior, prec, obs, opts);
    } else {
      enif::MdaOptions mda;
      if (!a.alphas.empty()) mda.alphas = a.alphas;
      mda.seed = enif::derive_seed(a.seed, 1);
      mda.enif = opts;
      result = enif::enif_mda(prior, prec, obs, mda);
    }
  } else if (a.method == "es" || a.method == "es-dist" || a.method == "es-adaptive") {
    enif::EnkfOptions opts;
    if (a.method == "es-dist") {
      if (a.distances.empty()) enif::fail(enif::ErrorCode::invalid_argument, "es-dist needs --distances (p x m CSV)");
      opts.localisation = enif::Localisation::distance(a.c, enif::load_matrix_csv(a.distances));
    } else if (a.method == "es-adaptive") {
      opts.localisation = enif::Localisation::adaptive(a.threshold);
    }
    result = enif::enkf_update(prior, obs, opts);
  } else {
    enif::fail(enif::ErrorCode::invalid_argument, "unknown method '" + a.method + "'");
  }

  if (!a.out.empty()) enif::save_ensemble(a.out, result.posterior);
  if (!a.precision_out.empty()) {
    if (!result.posterior_precision) enif::fail(enif::ErrorCode::invalid_argument, a.method + " has no posterior precision");
    auto out = open_out(a.precision_out);
    enif::write_triplets(out, *result.posterior_precision);
  }

  lab::Json summary;
  summary["method"] = a.method;
  summary["members"] = n;
  summary["dim"] = p;
  summary["observations"] = m;
  summary["mean_update"] = std::vector<double>(result.diagnostics.mean_update.begin(), result.diagnostics.mean_update.end());
  summary["variance_ratio"] =
      std::vector<double>(result.diagnostics.variance_ratio.begin(), result.diagnostics.variance_ratio.end());
  if (result.h) summary["h_nonzeros"] = result.h->nonZeros();
  if (!a.summary.empty()) {
    auto out = open_out(a.summary);
    out << summary.dump(2) << '\n';
  } else if (a.out.empty()) {
    std::cout << summary.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble information filter experiments"};
  app.set_version_flag("--version", std::string(enif::version));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run_cmd->add_option("config", run.config, "Config file")->required();
  run_cmd->add_option("--output-root", run.output_root, "Output root (default $ENIF_LAB_OUTPUT or ./enif-lab-output)");
  run_cmd->add_option("--seed", run.seed, "Override the config seed");
  run_cmd->add_option("--threads", run.threads, "Override the worker count (0 = all cores)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw an ensemble from a built-in simulator");
  sim_cmd->add_option("--model", sim.model, "ar1, ou, lorenz96 or grf")->capture_default_str();
  sim_cmd->add_option("-n,--members", sim.members, "Ensemble size")->capture_default_str();
  sim_cmd->add_option("-p,--dim", sim.dim, "State dimension (ar1, ou, lorenz96)")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--phi", sim.phi)->capture_default_str();
  sim_cmd->add_option("--kappa", sim.kappa)->capture_default_str();
  sim_cmd->add_option("--dt", sim.dt)->capture_default_str();
  sim_cmd->add_option("--forcing", sim.forcing)->capture_default_str();
  sim_cmd->add_option("--t-end", sim.t_end)->capture_default_str();
  sim_cmd->add_option("--scheme", sim.scheme, "rk4 or euler")->capture_default_str();
  sim_cmd->add_option("--rows", sim.rows)->capture_default_str();
  sim_cmd->add_option("--cols", sim.cols)->capture_default_str();
  sim_cmd->add_option("--range-x", sim.range_x)->capture_default_str();
  sim_cmd->add_option("--range-y", sim.range_y)->capture_default_str();
  sim_cmd->add_option("--angle", sim.angle)->capture_default_str();
  sim_cmd->add_option("-o,--out", sim.out, "Ensemble file (.bin binary, otherwise CSV)")->required();
  sim_cmd->add_option("--precision-out", sim.precision_out, "Oracle precision as triplets (ar1, ou)");
  sim_cmd->add_option("--graph-out", sim.graph_out, "Model graph as an edge list");

  AssimilateArgs as;
  auto* as_cmd = app.add_subcommand("assimilate", "Update a prior ensemble with observations");
  as_cmd->add_option("--prior", as.prior, "Prior ensemble (n x p)")->required();
  as_cmd->add_option("--observations", as.observations, "Observed values d (CSV)")->required();
  as_cmd->add_option("--responses", as.responses, "Responses h(u) per member (n x m CSV)");
  as_cmd->add_option("--operator", as.h, "Linear observation operator as triplets");
  as_cmd->add_option("--noise-variance", as.noise_variance, "Observation noise variance")->capture_default_str();
  as_cmd->add_option("--noise-precision", as.noise_precision, "Observation noise precision as triplets");
  as_cmd->add_option("--method", as.method, "enif, enif-mda, es, es-dist or es-adaptive")->capture_default_str();
  as_cmd->add_option("--h-method", as.h_method, "known, lasso or lls")->capture_default_str();
  as_cmd->add_option("--graph", as.graph, "Edge list for the precision fit");
  as_cmd->add_option("--graph-kind", as.graph_kind, "chain, complete, empty, circular:K or lattice:RxC");
  as_cmd->add_option("--precision", as.precision, "Prior precision as triplets (skips the fit)");
  as_cmd->add_option("--alphas", as.alphas, "MDA weights")->delimiter(',');
  as_cmd->add_option("--c", as.c, "Distance localisation strength")->capture_default_str();
  as_cmd->add_option("--distances", as.distances, "p x m distance CSV for es-dist");
  as_cmd->add_option("--threshold", as.threshold, "Adaptive localisation threshold (default 3/sqrt(n))");
  as_cmd->add_option("--seed", as.seed, "Seed of the observation perturbations")->capture_default_str();
  as_cmd->add_option("-o,--out", as.out, "Posterior ensemble");
  as_cmd->add_option("--precision-out", as.precision_out, "Posterior precision as triplets (EnIF)");
  as_cmd->add_option("--summary", as.summary, "JSON summary (printed when no output is given)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_config;
  }

  try {
    if (run_cmd->parsed()) return run_command(run);
    if (sim_cmd->parsed()) return simulate_command(sim);
    return assimilate_command(as);
  } catch (const enif::Error& e) {
    std::cerr << "enif-lab: " << e.what() << '\n';
    return e.is_numerical() ? exit_numerical : exit_config;
  } catch (const std::exception& e) {
    std::cerr << "enif-lab: " << e.what() << '\n';
    return exit_config;
  }
}
