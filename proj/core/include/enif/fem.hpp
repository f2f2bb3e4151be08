#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "enif/graph.hpp"
#include "enif/sparse.hpp"

namespace enif {

struct TriangleMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;
  std::vector<std::array<Index, 3>> triangles;

  Index node_count() const noexcept { return nodes.rows(); }
};

/// Structured triangulation of [0, width] x [0, height] with nx x ny cells, each split along
/// its lower-left to upper-right diagonal. Node (i, j) (column i, row j) has index j * (nx + 1) + i.
TriangleMesh rectangle_mesh(Index nx, Index ny, double width = 1.0, double height = 1.0);

struct IntervalMesh {
  Eigen::VectorXd nodes;  ///< strictly increasing

  Index node_count() const noexcept { return nodes.size(); }
};

IntervalMesh uniform_interval_mesh(Index node_count, double length);

using TriangleVertices = Eigen::Matrix<double, 3, 2>;

/// Signed area, positive for counter-clockwise vertices.
double signed_area(const TriangleVertices& v);
Eigen::Matrix3d local_mass(double area);
Eigen::Matrix3d local_lumped_mass(double area);
/// alpha * Area * (b_i b_j + c_i c_j) with (b_i, c_i) the constant gradient of basis function i.
/// Throws DegenerateElement for (near) zero area.
Eigen::Matrix3d local_stiffness(const TriangleVertices& v, double alpha);

struct FemMatrices {
  SparseSpd mass;
  SparseSpd lumped_mass;  ///< row-sum diagonal of `mass`
  SparseSpd stiffness;    ///< assembled from alpha * grad(phi_i) . grad(phi_j); singular along constants
};

FemMatrices assemble_fem(const TriangleMesh& mesh, double alpha = 1.0);
FemMatrices assemble_fem(const IntervalMesh& mesh, double alpha = 1.0);

CIGraph mesh_graph(const TriangleMesh& mesh);

/// Euler-Maruyama discretisation of du/dt = alpha lap(u) + sigma W with lumped mass:
/// u_{t+1} = B u_t + w_t, B = I - dt Mt^{-1} A, Prec(w) = Mt / (sigma dt)^2.
struct HeatModel {
  FemMatrices fem;
  SparseMatrix transition;
  SparseSpd innovation_precision;
};

HeatModel fem_heat_assemble(const TriangleMesh& mesh, double alpha, double sigma, double dt);

/// Joint precision of (u_1, ..., u_T) for `blocks` = T time steps with u_1 drawn from the
/// innovation law: block tridiagonal, off-diagonal blocks -B^T Mt, diagonal blocks
/// Mt + B^T Mt B except the last, which is Mt; everything scaled by 1 / (sigma dt)^2.
SparseSpd smoothing_precision(const HeatModel& model, Index blocks);

/// Matern precision from FEM matrices with K = kappa^2 Mt + A: K for alpha = 1 and
/// K Mt^{-1} K for alpha = 2.
SparseSpd matern_fem_precision(double kappa, const FemMatrices& fem, int alpha = 2);

}  // namespace enif
