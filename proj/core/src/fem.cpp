#include "enif/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "enif/error.hpp"

namespace enif {

using Eigen::Matrix3d;
using Eigen::VectorXd;

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat to_matrix(const SparseSpd& m) { return m.to_full(); }

SparseSpd to_spd(const SpMat& m) { return SparseSpd::from_full(m); }

}  // namespace

TriangleMesh rectangle_mesh(Index nx, Index ny, double width, double height) {
  require(nx >= 1 && ny >= 1, ErrorCode::invalid_argument, "mesh needs at least one cell per direction");
  require(width > 0.0 && height > 0.0, ErrorCode::invalid_argument, "mesh extent must be positive");
  TriangleMesh mesh;
  mesh.nodes.resize((nx + 1) * (ny + 1), 2);
  for (Index j = 0; j <= ny; ++j) {
    for (Index i = 0; i <= nx; ++i) {
      const Index id = j * (nx + 1) + i;
      mesh.nodes(id, 0) = width * static_cast<double>(i) / static_cast<double>(nx);
      mesh.nodes(id, 1) = height * static_cast<double>(j) / static_cast<double>(ny);
    }
  }
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index a = j * (nx + 1) + i;
      const Index b = a + 1;
      const Index c = a + (nx + 1);
      const Index d = c + 1;
      mesh.triangles.push_back({a, b, d});
      mesh.triangles.push_back({a, d, c});
    }
  }
  return mesh;
}

IntervalMesh uniform_interval_mesh(Index node_count, double length) {
  require(node_count >= 2 && length > 0.0, ErrorCode::invalid_argument, "interval mesh needs >= 2 nodes and positive length");
  return {VectorXd::LinSpaced(node_count, 0.0, length)};
}

double signed_area(const TriangleVertices& v) {
  return 0.5 * ((v(1, 0) - v(0, 0)) * (v(2, 1) - v(0, 1)) - (v(2, 0) - v(0, 0)) * (v(1, 1) - v(0, 1)));
}

Matrix3d local_mass(double area) {
  Matrix3d m = Matrix3d::Constant(1.0);
  m.diagonal().setConstant(2.0);
  return std::abs(area) / 12.0 * m;
}

Matrix3d local_lumped_mass(double area) { return std::abs(area) / 3.0 * Matrix3d::Identity(); }

Matrix3d local_stiffness(const TriangleVertices& v, double alpha) {
  const double area = signed_area(v);
  double scale = 0.0;
  for (int i = 0; i < 3; ++i) scale = std::max(scale, (v.row(i) - v.row((i + 1) % 3)).squaredNorm());
  if (!(std::abs(area) > 1e-14 * scale)) fail(ErrorCode::degenerate_element, "triangle with zero area");
  Eigen::Vector3d b;
  Eigen::Vector3d c;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    b[i] = (v(j, 1) - v(k, 1)) / (2.0 * area);
    c[i] = (v(k, 0) - v(j, 0)) / (2.0 * area);
  }
  return alpha * std::abs(area) * (b * b.transpose() + c * c.transpose());
}

FemMatrices assemble_fem(const TriangleMesh& mesh, double alpha) {
  const Index p = mesh.node_count();
  std::vector<Triplet> mass;
  std::vector<Triplet> lumped;
  std::vector<Triplet> stiff;
  for (const auto& tri : mesh.triangles) {
    TriangleVertices v;
    for (int i = 0; i < 3; ++i) {
      require(tri[static_cast<std::size_t>(i)] >= 0 && tri[static_cast<std::size_t>(i)] < p, ErrorCode::invalid_argument,
              "triangle references a missing node");
      v.row(i) = mesh.nodes.row(tri[static_cast<std::size_t>(i)]);
    }
    const Matrix3d k = local_stiffness(v, alpha);
    const double area = signed_area(v);
    const Matrix3d m = local_mass(area);
    const Matrix3d ml = local_lumped_mass(area);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j <= i; ++j) {
        const Index a = tri[static_cast<std::size_t>(i)];
        const Index b = tri[static_cast<std::size_t>(j)];
        mass.push_back({a, b, m(i, j)});
        stiff.push_back({a, b, k(i, j)});
        if (i == j) lumped.push_back({a, a, ml(i, i)});
      }
    }
  }
  return {SparseSpd::from_triplets(p, mass), SparseSpd::from_triplets(p, lumped), SparseSpd::from_triplets(p, stiff)};
}

FemMatrices assemble_fem(const IntervalMesh& mesh, double alpha) {
  const Index p = mesh.node_count();
  std::vector<Triplet> mass;
  std::vector<Triplet> lumped;
  std::vector<Triplet> stiff;
  for (Index e = 0; e + 1 < p; ++e) {
    const double h = mesh.nodes[e + 1] - mesh.nodes[e];
    if (!(h > 0.0)) fail(ErrorCode::degenerate_element, "interval element " + std::to_string(e) + " has no length");
    mass.push_back({e, e, h / 3.0});
    mass.push_back({e + 1, e + 1, h / 3.0});
    mass.push_back({e + 1, e, h / 6.0});
    lumped.push_back({e, e, h / 2.0});
    lumped.push_back({e + 1, e + 1, h / 2.0});
    stiff.push_back({e, e, alpha / h});
    stiff.push_back({e + 1, e + 1, alpha / h});
    stiff.push_back({e + 1, e, -alpha / h});
  }
  return {SparseSpd::from_triplets(p, mass), SparseSpd::from_triplets(p, lumped), SparseSpd::from_triplets(p, stiff)};
}

CIGraph mesh_graph(const TriangleMesh& mesh) {
  std::vector<Edge> e;
  for (const auto& t : mesh.triangles) {
    e.push_back({t[0], t[1]});
    e.push_back({t[1], t[2]});
    e.push_back({t[0], t[2]});
  }
  return CIGraph(mesh.node_count(), e);
}

HeatModel fem_heat_assemble(const TriangleMesh& mesh, double alpha, double sigma, double dt) {
  require(sigma > 0.0 && dt > 0.0, ErrorCode::invalid_argument, "sigma and dt must be positive");
  HeatModel model{assemble_fem(mesh, alpha), {}, {}};
  const Index p = mesh.node_count();
  const VectorXd inv_lumped = model.fem.lumped_mass.diagonal().cwiseInverse();
  SpMat b = SpMat(inv_lumped.asDiagonal() * to_matrix(model.fem.stiffness)) * -dt;
  for (Index i = 0; i < p; ++i) b.coeffRef(i, i) += 1.0;
  b.prune(0.0);
  model.transition = SparseMatrix(b);
  model.innovation_precision = model.fem.lumped_mass.scaled(1.0 / (sigma * dt * sigma * dt));
  return model;
}

SparseSpd smoothing_precision(const HeatModel& model, Index blocks) {
  require(blocks >= 1, ErrorCode::invalid_argument, "smoothing precision needs at least one block");
  const SpMat q = to_matrix(model.innovation_precision);
  const SpMat b = SpMat(model.transition);
  const SpMat bt_q = SpMat(b.transpose()) * q;
  SpMat interior = q + SpMat(bt_q * b);
  interior = SpMat(0.5 * (interior + SpMat(interior.transpose())));
  const SpMat off = SpMat(-bt_q);
  const Index s = q.rows();

  std::vector<Triplet> t;
  auto put = [&](const SpMat& block, Index r0, Index c0, bool lower_only) {
    for (Index j = 0; j < block.outerSize(); ++j) {
      for (SpMat::InnerIterator it(block, j); it; ++it) {
        if (lower_only && it.row() < it.col()) continue;
        t.push_back({r0 + it.row(), c0 + it.col(), it.value()});
      }
    }
  };
  for (Index k = 0; k < blocks; ++k) {
    put(k + 1 == blocks ? q : interior, k * s, k * s, true);
    // Block (k+1, k) holds (-B^T Mt)^T = -Mt B; it lives strictly below the diagonal.
    if (k + 1 < blocks) put(SpMat(off.transpose()), (k + 1) * s, k * s, false);
  }
  return SparseSpd::from_triplets(s * blocks, t);
}

SparseSpd matern_fem_precision(double kappa, const FemMatrices& fem, int alpha) {
  require(kappa > 0.0, ErrorCode::invalid_argument, "kappa must be positive");
  require(alpha == 1 || alpha == 2, ErrorCode::invalid_argument, "FEM Matern precision supports alpha 1 or 2");
  const SpMat k = kappa * kappa * to_matrix(fem.lumped_mass) + to_matrix(fem.stiffness);
  if (alpha == 1) return to_spd(k);
  const VectorXd inv_lumped = fem.lumped_mass.diagonal().cwiseInverse();
  SpMat prec = SpMat(k.transpose()) * SpMat(inv_lumped.asDiagonal() * k);
  prec = SpMat(0.5 * (prec + SpMat(prec.transpose())));
  return to_spd(prec);
}

}  // namespace enif
