#include <cmath>
#include <limits>
#include <string>

#include "lab/experiments.hpp"
#include "lab/parallel.hpp"
#include "support.hpp"

namespace lab {

LocalisationParams parse_localisation(ParamReader& r) {
  LocalisationParams p;
  p.kappa = r.get("kappa", p.kappa);
  p.dim = r.get("dim", p.dim);
  p.members = r.get("members", p.members);
  p.domain_length = r.get("domain_length", p.domain_length);
  p.noise_variance = r.get("noise_variance", p.noise_variance);
  p.c_min = r.get("c_min", p.c_min);
  p.c_max = r.get("c_max", p.c_max);
  p.radii = r.get("radii", p.radii);
  p.replicates = r.get("replicates", p.replicates);
  check(p.kappa > 0.0, "kappa must be positive");
  check(p.dim >= 2 && p.dim <= 4096, "dim must lie in [2, 4096]");
  check(p.members >= 3, "members must be at least 3");
  check(p.domain_length > 0.0 && p.domain_length / static_cast<double>(p.dim - 1) <= p.kappa,
        "domain_length must be positive with dt <= kappa");
  check(p.noise_variance > 0.0, "noise_variance must be positive");
  check(p.c_min > 0.0 && p.c_max > p.c_min, "need 0 < c_min < c_max");
  check(p.radii >= 2, "radii must be at least 2");
  check(p.replicates >= 1, "replicates must be at least 1");
  return p;
}

LocalisationResult run_localisation_sweep(const LocalisationParams& params, const Common& common, Sink& sink) {
  const Index p = params.dim;
  const double dt = params.domain_length / static_cast<double>(p - 1);

  LocalisationResult result;
  for (Index k = 0; k < params.radii; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(params.radii - 1);
    result.c.push_back(params.c_min * std::pow(params.c_max / params.c_min, t));
  }

  // delta_jk^2 between grid positions j dt and k dt.
  Eigen::MatrixXd dist2(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index k = 0; k < p; ++k) dist2(j, k) = std::pow(dt * static_cast<double>(j - k), 2);
  }

  struct Replicate {
    std::vector<double> es;
    double vanilla = 0.0;
    double enif = 0.0;
  };
  std::vector<Replicate> reps;
  {
    ScopedTimer timer(sink, "sweep");
    for (Index rep = 0; rep < params.replicates; ++rep) {
      sink.seed("replicate_" + std::to_string(rep), enif::derive_seed(common.seed, static_cast<std::uint64_t>(rep)));
    }
    reps = parallel_map(static_cast<std::size_t>(params.replicates), common.threads, [&](std::size_t rep) {
      const std::uint64_t seed = enif::derive_seed(common.seed, rep);
      const detail::OuProblem pb = detail::ou_problem(enif::ou_analytic_oracle(params.kappa, dt, p),
                                                      params.noise_variance, enif::derive_seed(seed, 1));
      const enif::Ensemble prior = enif::ou_euler_sample(params.kappa, dt, p, params.members, enif::derive_seed(seed, 2));
      const Eigen::VectorXd mean = prior.mean();
      const Eigen::MatrixXd cov = prior.covariance();

      Replicate out;
      out.vanilla = detail::dense_posterior_kld(mean, cov, pb);
      out.enif = detail::enif_posterior_kld(prior, pb);
      for (double c : result.c) {
        const Eigen::MatrixXd taper = (-c * dist2.array()).exp().matrix();
        out.es.push_back(detail::dense_posterior_kld(mean, cov.cwiseProduct(taper), pb));
      }
      return out;
    });
  }

  std::vector<double> vanilla, enif_kld;
  for (const Replicate& r : reps) {
    vanilla.push_back(r.vanilla);
    enif_kld.push_back(r.enif);
  }
  result.kld_vanilla = detail::median(vanilla);
  result.kld_enif = detail::median(enif_kld);
  CsvTable table({"c", "kld_es_localised", "kld_enif"});
  for (std::size_t k = 0; k < result.c.size(); ++k) {
    std::vector<double> v;
    for (const Replicate& r : reps) v.push_back(r.es[k]);
    result.kld_es.push_back(detail::median(v));
    table.add({result.c[k], result.kld_es.back(), result.kld_enif});
  }
  sink.table("localisation_sweep.csv", table);

  CsvTable ref({"model", "kld"});
  ref.add({std::string("es_vanilla"), result.kld_vanilla});
  ref.add({std::string("enif"), result.kld_enif});
  sink.table("reference.csv", ref);
  return result;
}

}  // namespace lab
