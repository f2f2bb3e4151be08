#include <cmath>
#include <string>

#include "lab/experiments.hpp"

namespace lab {

FemHeatParams parse_fem_heat(ParamReader& r) {
  FemHeatParams p;
  p.nx = r.get("nx", p.nx);
  p.ny = r.get("ny", p.ny);
  p.width = r.get("width", p.width);
  p.height = r.get("height", p.height);
  p.alpha = r.get("alpha", p.alpha);
  p.sigma = r.get("sigma", p.sigma);
  p.dt = r.get("dt", p.dt);
  p.blocks = r.get("blocks", p.blocks);
  p.members = r.get("members", p.members);
  p.noise_variance = r.get("noise_variance", p.noise_variance);
  p.observation = r.get("observation", p.observation);
  check(p.nx >= 1 && p.ny >= 1, "nx and ny must be at least 1");
  check(p.width > 0.0 && p.height > 0.0, "width and height must be positive");
  check(p.alpha > 0.0 && p.sigma > 0.0 && p.dt > 0.0, "alpha, sigma and dt must be positive");
  check(p.blocks >= 1, "blocks must be at least 1");
  check(p.members >= 2, "members must be at least 2");
  check(p.noise_variance > 0.0, "noise_variance must be positive");
  return p;
}

namespace {

enif::CIGraph two_hop(const enif::CIGraph& g) {
  std::vector<enif::Edge> edges;
  for (Index v = 0; v < g.size(); ++v) {
    for (Index a : g.neighbours(v)) {
      if (v < a) edges.push_back({v, a});
      for (Index b : g.neighbours(a)) {
        if (v < b) edges.push_back({v, b});
      }
    }
  }
  return enif::CIGraph(g.size(), edges);
}

}  // namespace

FemHeatResult run_fem_heat_demo(const FemHeatParams& params, const Common& common, Sink& sink) {
  FemHeatResult result;
  const enif::TriangleMesh mesh = enif::rectangle_mesh(params.nx, params.ny, params.width, params.height);
  const Index nodes = mesh.node_count();

  enif::HeatModel model;
  enif::SparseSpd joint;
  {
    ScopedTimer timer(sink, "assemble");
    model = enif::fem_heat_assemble(mesh, params.alpha, params.sigma, params.dt);
    joint = enif::smoothing_precision(model, params.blocks);
  }

  const Eigen::SparseMatrix<double> a = model.fem.stiffness.to_full();
  const Eigen::VectorXd row_sums = a * Eigen::VectorXd::Ones(nodes);
  result.max_row_sum = row_sums.cwiseAbs().maxCoeff();

  const enif::CIGraph spatial = enif::mesh_graph(mesh);
  const enif::CIGraph expected = enif::temporal_block_graph(two_hop(spatial), spatial, params.blocks);
  result.pattern_ok = enif::graph_from_sparsity(joint).is_subgraph_of(expected);
  result.precision_nnz = joint.nnz();

  sink.text("mass.triplets", [&](std::ostream& o) { enif::write_triplets(o, model.fem.mass); });
  sink.text("lumped_mass.triplets", [&](std::ostream& o) { enif::write_triplets(o, model.fem.lumped_mass); });
  sink.text("stiffness.triplets", [&](std::ostream& o) { enif::write_triplets(o, model.fem.stiffness); });
  sink.text("transition.triplets", [&](std::ostream& o) { enif::write_triplets(o, model.transition); });
  sink.text("smoothing_precision.triplets", [&](std::ostream& o) { enif::write_triplets(o, joint); });
  sink.text("mesh_graph.edges", [&](std::ostream& o) { enif::write_edge_list(o, spatial); });

  // Prior ensemble drawn from the space-time law, centre node observed at the last time.
  const Index p = joint.dim();
  const Index centre = (params.ny / 2) * (params.nx + 1) + params.nx / 2;
  enif::SparseMatrix h(1, p);
  h.insert(0, (params.blocks - 1) * nodes + centre) = 1.0;
  h.makeCompressed();
  const enif::SparseSpd noise_prec = enif::SparseSpd::diagonal(Eigen::VectorXd::Constant(1, 1.0 / params.noise_variance));
  const Eigen::VectorXd d = Eigen::VectorXd::Constant(1, params.observation);

  const std::uint64_t seed = enif::derive_seed(common.seed, 0);
  sink.seed("ensemble", seed);
  const enif::CholeskyFactor factor = enif::cholesky(joint);
  const Eigen::MatrixXd z = enif::standard_normal_rows(params.members, p, enif::derive_seed(seed, 1));
  const enif::Ensemble prior(factor.inverse_sqrt_transpose(z.transpose()).transpose());

  enif::UpdateResult update;
  {
    ScopedTimer timer(sink, "smoother");
    update = enif::smoother_update(prior, joint, enif::linear_observation(prior, h, d, noise_prec, enif::derive_seed(seed, 2)));
  }
  const Eigen::VectorXd prior_mean = prior.mean();
  const enif::CanonicalPosterior exact = enif::condition_precision(prior_mean, joint, h, noise_prec, d);

  CsvTable table({"block", "mean_update_norm", "exact_update_norm"});
  for (Index t = 0; t < params.blocks; ++t) {
    result.update_norm.push_back(update.diagnostics.mean_update.segment(t * nodes, nodes).norm());
    result.exact_update_norm.push_back((exact.mean - prior_mean).segment(t * nodes, nodes).norm());
    table.add({static_cast<long long>(t), result.update_norm.back(), result.exact_update_norm.back()});
  }
  sink.table("smoother_update.csv", table);

  CsvTable checks({"check", "value"});
  checks.add({std::string("max_abs_stiffness_row_sum"), result.max_row_sum});
  checks.add({std::string("markov_pattern_ok"), static_cast<long long>(result.pattern_ok)});
  checks.add({std::string("smoothing_precision_nnz"), static_cast<long long>(result.precision_nnz)});
  sink.table("checks.csv", checks);
  return result;
}

}  // namespace lab
