#include <cmath>
#include <string>

#include "lab/experiments.hpp"
#include "lab/parallel.hpp"
#include "support.hpp"

namespace lab {

GrfParams parse_grf(ParamReader& r) {
  GrfParams p;
  p.grids = r.get("grids", p.grids);
  p.members = r.get("members", p.members);
  p.range_x = r.get("range_x", p.range_x);
  p.range_y = r.get("range_y", p.range_y);
  p.angle = r.get("angle", p.angle);
  p.response_noise_sd = r.get("response_noise_sd", p.response_noise_sd);
  p.noise_variance = r.get("noise_variance", p.noise_variance);
  p.band = r.get("band", p.band);
  p.replicates = r.get("replicates", p.replicates);
  p.methods = r.get("methods", p.methods);
  check(!p.grids.empty(), "grids must not be empty");
  for (Index g : p.grids) {
    check(g >= 2, "grid side must be at least 2");
    check(g * g <= enif::grf_oracle_limit, "grid " + std::to_string(g) + "x" + std::to_string(g) +
                                               " exceeds the exact-sampling limit of " +
                                               std::to_string(enif::grf_oracle_limit) + " cells");
  }
  check(p.members >= 3, "members must be at least 3");
  check(p.range_x > 0.0 && p.range_y > 0.0, "ranges must be positive");
  check(p.response_noise_sd >= 0.0, "response_noise_sd must be non-negative");
  check(p.noise_variance > 0.0, "noise_variance must be positive");
  check(p.band >= 0, "band must be non-negative");
  check(p.replicates >= 1, "replicates must be at least 1");
  check(!p.methods.empty(), "methods must not be empty");
  for (const std::string& m : p.methods) check(m == "es" || m == "es-adaptive" || m == "enif", "unknown method " + m);
  return p;
}

SupportStats diagonal_support(const enif::SparseMatrix& h, Index rows, Index cols) {
  SupportStats s;
  s.support = h.nonZeros();
  Index hits = 0;
  const Index m = std::min(rows, cols);
  for (Index k = 0; k < m && k < h.rows(); ++k) {
    if (h.coeff(k, k * cols + k) != 0.0) ++hits;
  }
  s.true_positive = m > 0 ? static_cast<double>(hits) / static_cast<double>(m) : 0.0;
  return s;
}

namespace {

struct Energy {
  double band, off_band;
};

Energy energy(const Eigen::VectorXd& update, Index g, Index band) {
  double in = 0.0, total = 0.0;
  for (Index r = 0; r < g; ++r) {
    for (Index c = 0; c < g; ++c) {
      const double e = update[r * g + c] * update[r * g + c];
      total += e;
      if (std::abs(r - c) <= band) in += e;
    }
  }
  if (!(total > 0.0)) return {0.0, 0.0};
  return {in / total, 1.0 - in / total};
}

}  // namespace

GrfResult run_grf2d_update(const GrfParams& params, const Common& common, Sink& sink) {
  GrfResult result;
  CsvTable stats({"grid", "method", "band_energy", "off_band_energy"});
  CsvTable support({"grid", "h_support", "h_true_positive", "observed_cells"});

  for (Index g : params.grids) {
    ScopedTimer timer(sink, "grid_" + std::to_string(g));
    const enif::GrfModel model{g, g, params.range_x, params.range_y, params.angle};
    const enif::GaussianSampler sampler(Eigen::VectorXd::Zero(g * g), enif::grf_covariance(model));
    const enif::CIGraph graph = enif::lattice_graph(g, g, enif::Neighbourhood::eight);
    const Index p = g * g;
    const Index m = g;
    const Index n = params.members;
    enif::SparseMatrix h_true(m, p);
    for (Index k = 0; k < m; ++k) h_true.insert(k, k * g + k) = 1.0;
    h_true.makeCompressed();
    const enif::SparseSpd noise_prec = enif::SparseSpd::diagonal(Eigen::VectorXd::Constant(m, 1.0 / params.noise_variance));

    struct Outcome {
      std::vector<Eigen::VectorXd> updates;
      SupportStats support;
    };
    const std::uint64_t grid_seed = enif::derive_seed(common.seed, static_cast<std::uint64_t>(g));
    sink.seed("grid_" + std::to_string(g), grid_seed);
    const std::vector<Outcome> outcomes = parallel_map(
        static_cast<std::size_t>(params.replicates), common.threads, [&](std::size_t rep) {
          const std::uint64_t seed = enif::derive_seed(grid_seed, rep);
          const enif::Ensemble prior = sampler.sample(n, enif::derive_seed(seed, 1));
          const Eigen::VectorXd truth = sampler.sample(1, enif::derive_seed(seed, 2)).data().row(0).transpose();

          enif::ObservationSpec obs;
          obs.responses = prior.data() * enif::SparseMatrix(h_true.transpose()) +
                          params.response_noise_sd * enif::standard_normal_rows(n, m, enif::derive_seed(seed, 3));
          enif::Rng rng(enif::derive_seed(seed, 4));
          obs.d.resize(m);
          for (Index k = 0; k < m; ++k) {
            obs.d[k] = truth[k * g + k] + params.response_noise_sd * rng.normal() + std::sqrt(params.noise_variance) * rng.normal();
          }
          obs.noise_precision = noise_prec;
          obs.noise_draws = enif::draw_observation_noise(noise_prec, n, enif::derive_seed(seed, 5));

          Outcome out;
          for (const std::string& method : params.methods) {
            enif::UpdateResult r;
            if (method == "enif") {
              const enif::SparseSpd prec = enif::unwrap_precision(enif::fit_affine_kr(prior, graph));
              r = enif::enif_update(prior, prec, obs, {enif::HMethod::monotone_lasso, {}});
              out.support = diagonal_support(*r.h, g, g);
            } else {
              enif::EnkfOptions opt;
              if (method == "es-adaptive") opt.localisation = enif::Localisation::adaptive();
              r = enif::enkf_update(prior, obs, opt);
            }
            out.updates.push_back(r.diagnostics.mean_update);
          }
          return out;
        });

    GrfGridResult grid;
    grid.grid = g;
    for (std::size_t j = 0; j < params.methods.size(); ++j) {
      GrfMethodResult mr;
      mr.method = params.methods[j];
      mr.mean_update = outcomes.front().updates[j];
      std::vector<double> band, off;
      for (const Outcome& o : outcomes) {
        const Energy e = energy(o.updates[j], g, params.band);
        band.push_back(e.band);
        off.push_back(e.off_band);
      }
      mr.band_energy = detail::median(band);
      mr.off_band_energy = detail::median(off);
      stats.add({static_cast<long long>(g), mr.method, mr.band_energy, mr.off_band_energy});
      sink.matrix("mean_update_" + mr.method + "_" + std::to_string(g) + ".csv",
                  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                      mr.mean_update.data(), g, g));
      grid.methods.push_back(std::move(mr));
    }
    std::vector<double> sup, tp;
    for (const Outcome& o : outcomes) {
      sup.push_back(static_cast<double>(o.support.support));
      tp.push_back(o.support.true_positive);
    }
    grid.h_support = detail::median(sup);
    grid.h_true_positive = detail::median(tp);
    support.add({static_cast<long long>(g), grid.h_support, grid.h_true_positive, static_cast<long long>(m)});
    result.grids.push_back(std::move(grid));
  }
  sink.table("update_energy.csv", stats);
  sink.table("h_support.csv", support);
  return result;
}

}  // namespace lab
