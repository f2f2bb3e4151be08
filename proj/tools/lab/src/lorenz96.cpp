#include <string>

#include "lab/experiments.hpp"
#include "lab/parallel.hpp"

namespace lab {

LorenzParams parse_lorenz(ParamReader& r) {
  LorenzParams p;
  p.states = r.get("states", p.states);
  p.forcing = r.get("forcing", p.forcing);
  p.dt = r.get("dt", p.dt);
  p.t_end = r.get("t_end", p.t_end);
  p.scheme = r.get("scheme", p.scheme);
  p.sizes = r.get("sizes", p.sizes);
  p.test_members = r.get("test_members", p.test_members);
  p.max_order = r.get("max_order", p.max_order);
  p.replicates = r.get("replicates", p.replicates);
  check(p.states >= 4, "states must be at least 4");
  check(p.dt > 0.0 && p.t_end >= 0.0, "need dt > 0 and t_end >= 0");
  check(p.scheme == "rk4" || p.scheme == "euler", "scheme must be rk4 or euler");
  check(!p.sizes.empty(), "sizes must not be empty");
  for (Index n : p.sizes) check(n >= 3, "every size must be at least 3");
  check(p.test_members >= 0, "test_members must be non-negative");
  check(p.max_order >= 1 && 2 * p.max_order < p.states, "max_order must satisfy 1 <= order < states / 2");
  check(p.replicates >= 1, "replicates must be at least 1");
  return p;
}

LorenzResult run_lorenz96_markov_order(const LorenzParams& params, const Common& common, Sink& sink) {
  const enif::IntegratorScheme scheme = params.scheme == "rk4" ? enif::IntegratorScheme::rk4 : enif::IntegratorScheme::euler;
  std::vector<enif::CIGraph> graphs;
  for (Index k = 1; k <= params.max_order; ++k) graphs.push_back(enif::circular_markov_graph(params.states, k));

  struct Task {
    Index size, replicate;
  };
  std::vector<Task> tasks;
  for (Index rep = 0; rep < params.replicates; ++rep) {
    for (Index n : params.sizes) tasks.push_back({n, rep});
  }
  const auto seed_of = [&](const Task& t) {
    return enif::derive_seed(common.seed, static_cast<std::uint64_t>(t.replicate) * 100000 + static_cast<std::uint64_t>(t.size));
  };
  for (const Task& t : tasks) sink.seed("n_" + std::to_string(t.size) + "_rep_" + std::to_string(t.replicate), seed_of(t));

  LorenzResult result;
  {
    ScopedTimer timer(sink, "fits");
    result.runs = parallel_map(tasks.size(), common.threads, [&](std::size_t k) {
      const Task& t = tasks[k];
      const std::uint64_t seed = seed_of(t);
      const Index n_test = params.test_members > 0 ? params.test_members : t.size;
      const auto integrate = [&](Index n, std::uint64_t s) {
        return enif::lorenz96_integrate(enif::lorenz96_initial(n, params.states, s), params.forcing, params.dt,
                                        params.t_end, scheme);
      };
      const enif::Ensemble train = integrate(t.size, enif::derive_seed(seed, 1));
      const enif::Ensemble test = integrate(n_test, enif::derive_seed(seed, 2));
      LorenzRun run;
      run.size = t.size;
      run.replicate = t.replicate;
      run.curve = enif::nll_curve(train, test, graphs);
      run.best_order = enif::argmin_test(run.curve) + 1;
      return run;
    });
  }

  CsvTable curves({"size", "replicate", "order", "edges", "train_nll", "test_nll"});
  CsvTable best({"size", "replicate", "argmin_test_order"});
  for (const LorenzRun& run : result.runs) {
    for (std::size_t k = 0; k < run.curve.size(); ++k) {
      curves.add({static_cast<long long>(run.size), static_cast<long long>(run.replicate), static_cast<long long>(k + 1),
                  static_cast<long long>(run.curve[k].edges), run.curve[k].train, run.curve[k].test});
    }
    best.add({static_cast<long long>(run.size), static_cast<long long>(run.replicate), static_cast<long long>(run.best_order)});
  }
  sink.table("nll_curves.csv", curves);
  sink.table("argmin.csv", best);
  return result;
}

}  // namespace lab
