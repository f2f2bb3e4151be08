#include <string>

#include "lab/experiments.hpp"

namespace lab {

namespace {

struct TopLevel {
  std::string experiment;
  Common common;
  std::string output;
  Json params;
  Json resolved;
};

TopLevel parse_top(const Json& config) {
  ParamReader r(config, "config");
  TopLevel t;
  t.experiment = r.get<std::string>("experiment", "");
  t.common.seed = r.get<std::uint64_t>("seed", t.common.seed);
  t.common.threads = r.get<unsigned>("threads", t.common.threads);
  t.output = r.get<std::string>("output", t.experiment);
  t.params = r.get<Json>("params", Json::object());
  r.finish();
  t.resolved = r.resolved();
  bool known = false;
  for (const std::string& name : experiment_names()) known = known || name == t.experiment;
  if (!known) enif::fail(enif::ErrorCode::parse_error, "unknown experiment '" + t.experiment + "'");
  return t;
}

void note(Sink& sink, std::string parameter, std::string reference, std::string used) {
  if (reference != used) sink.desk_scale({std::move(parameter), std::move(reference), std::move(used)});
}

std::string list(const std::vector<Index>& v) {
  std::string s;
  for (Index x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

template <class Params, class Parse, class Run>
Json run_with(const TopLevel& top, Sink& sink, Parse parse, Run run, const std::function<void(const Params&)>& notes) {
  ParamReader r(top.params, "params");
  const Params params = parse(r);
  r.finish();
  notes(params);
  run(params, top.common, sink);
  return r.resolved();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"resolution_sweep", "dependence_strength", "localisation_sweep",
                                              "lorenz96_markov_order", "grf2d_update", "fem_heat_demo"};
  return names;
}

std::filesystem::path experiment_dir(const Json& config, const std::filesystem::path& root) {
  return root / parse_top(config).output;
}

void run_experiment(const Json& config, Sink& sink) {
  const TopLevel top = parse_top(config);
  Json params;
  const std::string& e = top.experiment;
  if (e == "resolution_sweep") {
    params = run_with<ResolutionSweepParams>(top, sink, parse_resolution_sweep, run_resolution_sweep, [&](const auto& p) {
      note(sink, "resolutions", "up to 1000", list(p.resolutions));
    });
  } else if (e == "dependence_strength") {
    params = run_with<DependenceParams>(top, sink, parse_dependence, run_dependence_strength, [](const auto&) {});
  } else if (e == "localisation_sweep") {
    params = run_with<LocalisationParams>(top, sink, parse_localisation, run_localisation_sweep, [&](const auto& p) {
      note(sink, "dim", "1000", std::to_string(p.dim));
      note(sink, "members", "1000", std::to_string(p.members));
    });
  } else if (e == "lorenz96_markov_order") {
    params = run_with<LorenzParams>(top, sink, parse_lorenz, run_lorenz96_markov_order, [](const auto&) {});
  } else if (e == "grf2d_update") {
    params = run_with<GrfParams>(top, sink, parse_grf, run_grf2d_update, [&](const auto& p) {
      Index largest = 0;
      for (Index g : p.grids) largest = std::max(largest, g);
      note(sink, "largest grid", "200x200", std::to_string(largest) + "x" + std::to_string(largest));
    });
  } else {
    params = run_with<FemHeatParams>(top, sink, parse_fem_heat, run_fem_heat_demo, [](const auto&) {});
  }
  Json echo = top.resolved;
  echo["params"] = params;
  sink.write_manifest(e, echo);
}

}  // namespace lab
