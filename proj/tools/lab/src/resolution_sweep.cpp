#include <cmath>
#include <string>

#include "lab/experiments.hpp"
#include "lab/parallel.hpp"
#include "support.hpp"

namespace lab {

namespace detail {

OuProblem ou_problem(const enif::GaussianOracle& truth, double noise_variance, std::uint64_t seed) {
  const Index p = truth.dim();
  OuProblem pb;
  pb.h = endpoint_operator(p);
  pb.noise_cov = Eigen::MatrixXd::Constant(1, 1, noise_variance);
  pb.noise_precision = enif::SparseSpd::diagonal(Eigen::VectorXd::Constant(1, 1.0 / noise_variance));
  enif::Rng rng(seed, 0);
  const double sd = std::sqrt(truth.cov(p - 1, p - 1) + noise_variance);
  pb.d = Eigen::VectorXd::Constant(1, truth.mean[p - 1] + sd * rng.normal());
  pb.posterior = enif::condition_gaussian(truth, Eigen::MatrixXd(pb.h), pb.noise_cov, pb.d);
  return pb;
}

double enif_posterior_kld(const enif::Ensemble& prior, const OuProblem& problem) {
  const Index p = prior.dim();
  const enif::KRMap map = enif::fit_affine_kr(prior, enif::chain_graph(p));
  const enif::SparseSpd prec = enif::unwrap_precision(map);
  const enif::CanonicalPosterior post =
      enif::condition_precision(map.mean, prec, problem.h, problem.noise_precision, problem.d);
  return enif::gaussian_kld(problem.posterior, post.mean, post.prec).total;
}

double dense_posterior_kld(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, const OuProblem& problem) {
  return kld_or_infinity([&] {
    const enif::GaussianOracle model{mean, cov, std::nullopt};
    const enif::GaussianOracle post = enif::condition_gaussian(model, Eigen::MatrixXd(problem.h), problem.noise_cov, problem.d);
    return enif::gaussian_kld(problem.posterior, post.mean, post.cov).total;
  });
}

}  // namespace detail

ResolutionSweepParams parse_resolution_sweep(ParamReader& r) {
  ResolutionSweepParams p;
  p.kappa = r.get("kappa", p.kappa);
  p.members = r.get("members", p.members);
  p.resolutions = r.get("resolutions", p.resolutions);
  p.domain_length = r.get("domain_length", p.domain_length);
  p.noise_variance = r.get("noise_variance", p.noise_variance);
  p.replicates = r.get("replicates", p.replicates);
  check(p.kappa > 0.0, "kappa must be positive");
  check(p.members >= 3, "members must be at least 3");
  check(!p.resolutions.empty(), "resolutions must not be empty");
  for (Index res : p.resolutions) {
    check(res >= 2 && res <= 4096, "resolutions must lie in [2, 4096]");
    check(p.domain_length / static_cast<double>(res - 1) <= p.kappa,
          "resolution " + std::to_string(res) + " gives dt > kappa (unstable Euler scheme)");
  }
  check(p.domain_length > 0.0, "domain_length must be positive");
  check(p.noise_variance > 0.0, "noise_variance must be positive");
  check(p.replicates >= 1, "replicates must be at least 1");
  return p;
}

ResolutionSweepResult run_resolution_sweep(const ResolutionSweepParams& params, const Common& common, Sink& sink) {
  struct Task {
    std::size_t resolution;
    Index replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t k = 0; k < params.resolutions.size(); ++k) {
    for (Index rep = 0; rep < params.replicates; ++rep) tasks.push_back({k, rep});
  }
  struct Klds {
    double euler, enif, es;
  };

  const auto seed_of = [&](const Task& t) {
    return enif::derive_seed(common.seed, static_cast<std::uint64_t>(params.resolutions[t.resolution]) * 1000 +
                                              static_cast<std::uint64_t>(t.replicate));
  };
  for (const Task& t : tasks) {
    sink.seed("resolution_" + std::to_string(params.resolutions[t.resolution]) + "_rep_" + std::to_string(t.replicate),
              seed_of(t));
  }

  std::vector<Klds> klds;
  {
    ScopedTimer timer(sink, "sweep");
    klds = parallel_map(tasks.size(), common.threads, [&](std::size_t k) {
      const Task& t = tasks[k];
      const Index p = params.resolutions[t.resolution];
      const double dt = params.domain_length / static_cast<double>(p - 1);
      const std::uint64_t seed = seed_of(t);
      const enif::OuEuler euler = enif::ou_euler_model(params.kappa, dt, p);
      const detail::OuProblem pb =
          detail::ou_problem(enif::ou_analytic_oracle(params.kappa, dt, p), params.noise_variance, enif::derive_seed(seed, 1));
      const enif::Ensemble prior = enif::ou_euler_sample(params.kappa, dt, p, params.members, enif::derive_seed(seed, 2));

      Klds out{};
      out.euler = detail::dense_posterior_kld(euler.oracle.mean, euler.oracle.cov, pb);
      out.enif = detail::enif_posterior_kld(prior, pb);
      out.es = detail::dense_posterior_kld(prior.mean(), prior.covariance(), pb);
      return out;
    });
  }

  ResolutionSweepResult result;
  CsvTable table({"resolution", "dt", "avg_kld_euler", "avg_kld_enif", "avg_kld_es"});
  for (std::size_t k = 0; k < params.resolutions.size(); ++k) {
    const Index p = params.resolutions[k];
    std::vector<double> e, f, s;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].resolution != k) continue;
      e.push_back(klds[i].euler);
      f.push_back(klds[i].enif);
      s.push_back(klds[i].es);
    }
    const double pd = static_cast<double>(p);
    ResolutionRow row{p, params.domain_length / (pd - 1.0), detail::median(e) / pd, detail::median(f) / pd,
                      detail::median(s) / pd};
    table.add({static_cast<long long>(p), row.dt, row.kld_euler, row.kld_enif, row.kld_es});
    result.rows.push_back(row);
  }
  sink.table("resolution_sweep.csv", table);
  return result;
}

}  // namespace lab
