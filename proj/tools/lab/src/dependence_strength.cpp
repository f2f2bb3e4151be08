#include <cmath>
#include <sstream>
#include <string>

#include "lab/experiments.hpp"
#include "lab/parallel.hpp"
#include "support.hpp"

namespace lab {

DependenceParams parse_dependence(ParamReader& r) {
  DependenceParams p;
  p.phis = r.get("phis", p.phis);
  p.dim = r.get("dim", p.dim);
  p.members = r.get("members", p.members);
  p.observation = r.get("observation", p.observation);
  p.noise_variance = r.get("noise_variance", p.noise_variance);
  p.replicates = r.get("replicates", p.replicates);
  check(!p.phis.empty(), "phis must not be empty");
  for (double phi : p.phis) check(std::abs(phi) < 1.0, "every phi must satisfy |phi| < 1");
  check(p.dim >= 2, "dim must be at least 2");
  check(p.members >= 3, "members must be at least 3");
  check(p.noise_variance > 0.0, "noise_variance must be positive");
  check(p.replicates >= 1, "replicates must be at least 1");
  return p;
}

DependenceResult run_dependence_strength(const DependenceParams& params, const Common& common, Sink& sink) {
  const Index p = params.dim;
  const Index n = params.members;
  const enif::SparseMatrix h = detail::endpoint_operator(p);
  const enif::SparseSpd noise_prec = enif::SparseSpd::diagonal(Eigen::VectorXd::Constant(1, 1.0 / params.noise_variance));
  const Eigen::VectorXd d = Eigen::VectorXd::Constant(1, params.observation);

  struct Outcome {
    double dev_enif, dev_es, interior_enif, interior_es;
    Eigen::MatrixXd first;
  };
  const std::size_t reps = static_cast<std::size_t>(params.replicates);
  const std::size_t count = params.phis.size() * reps;

  std::vector<Outcome> outcomes;
  {
    ScopedTimer timer(sink, "updates");
    for (std::size_t k = 0; k < params.phis.size(); ++k) {
      sink.seed("phi_" + std::to_string(k), enif::derive_seed(common.seed, k));
    }
    outcomes = parallel_map(count, common.threads, [&](std::size_t task) {
      const std::size_t k = task / reps;
      const std::size_t rep = task % reps;
      const double phi = params.phis[k];
      const std::uint64_t seed = enif::derive_seed(enif::derive_seed(common.seed, k), rep);

      const enif::GaussianOracle truth = enif::ar1_oracle(p, phi);
      const enif::Ensemble prior = enif::ar1_sample(p, phi, n, enif::derive_seed(seed, 1));
      const enif::ObservationSpec obs = enif::linear_observation(prior, h, d, noise_prec, enif::derive_seed(seed, 2));

      // Exact update: the Kalman gain of the true prior, applied member by member.
      const Eigen::VectorXd sh = truth.cov.col(p - 1);
      const Eigen::VectorXd gain = sh / (sh[p - 1] + params.noise_variance);
      const Eigen::VectorXd innovation = (-(obs.responses + obs.noise_draws)).col(0).array() + params.observation;
      const Eigen::MatrixXd exact = prior.data() + innovation * gain.transpose();

      const enif::KRMap map = enif::fit_affine_kr(prior, enif::chain_graph(p));
      const Eigen::MatrixXd by_enif = enif::enif_update(prior, enif::unwrap_precision(map), obs).posterior.data();
      const Eigen::MatrixXd by_es = enif::enkf_update(prior, obs).posterior.data();

      const auto rms = [&](const Eigen::MatrixXd& u, Index cols) {
        return std::sqrt((u - exact).leftCols(cols).rowwise().squaredNorm().mean());
      };
      Outcome out{rms(by_enif, p), rms(by_es, p), rms(by_enif, p - 1), rms(by_es, p - 1), Eigen::MatrixXd(p, 4)};
      out.first << prior.data().row(0).transpose(), exact.row(0).transpose(), by_enif.row(0).transpose(),
          by_es.row(0).transpose();
      return out;
    });
  }

  DependenceResult result;
  CsvTable table({"phi", "deviation_enif", "deviation_es", "interior_deviation_enif", "interior_deviation_es"});
  for (std::size_t k = 0; k < params.phis.size(); ++k) {
    std::vector<double> a, b, c, e;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const Outcome& o = outcomes[k * reps + rep];
      a.push_back(o.dev_enif);
      b.push_back(o.dev_es);
      c.push_back(o.interior_enif);
      e.push_back(o.interior_es);
    }
    DependenceRow row;
    row.phi = params.phis[k];
    row.deviation_enif = detail::median(a);
    row.deviation_es = detail::median(b);
    row.interior_deviation_enif = detail::median(c);
    row.interior_deviation_es = detail::median(e);
    row.first_member = outcomes[k * reps].first;
    table.add({row.phi, row.deviation_enif, row.deviation_es, row.interior_deviation_enif, row.interior_deviation_es});

    CsvTable trace({"index", "prior", "exact", "enif", "es"});
    for (Index j = 0; j < p; ++j) {
      trace.add({static_cast<long long>(j), row.first_member(j, 0), row.first_member(j, 1), row.first_member(j, 2),
                 row.first_member(j, 3)});
    }
    std::ostringstream name;
    name << "first_member_phi_" << row.phi << ".csv";
    sink.table(name.str(), trace);
    result.rows.push_back(std::move(row));
  }
  sink.table("dependence_strength.csv", table);
  return result;
}

}  // namespace lab
