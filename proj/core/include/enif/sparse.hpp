#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "enif/graph.hpp"
#include "enif/permutation.hpp"

namespace enif {

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// General rectangular sparse matrix (observation operators, transport factors).
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Sparse symmetric matrix stored as its lower triangle (diagonal included).
///
/// Only (i, j) with i >= j is stored; the upper triangle is implied. Off-diagonal entries whose
/// value is exactly zero are never stored, so the stored pattern is the matrix graph. Whether
/// the matrix is positive definite is established by factorising it.
class SparseSpd {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::ColMajor>;

  SparseSpd() = default;

  /// Entries with row < col are mirrored into the lower triangle; duplicates are summed.
  static SparseSpd from_triplets(Index dim, std::span<const Triplet> triplets);
  static SparseSpd from_dense(const Eigen::MatrixXd& dense);
  /// Takes the lower triangle of a full symmetric sparse matrix.
  static SparseSpd from_full(const Eigen::SparseMatrix<double>& full);
  static SparseSpd identity(Index dim);
  static SparseSpd diagonal(const Eigen::VectorXd& diag);

  Index dim() const noexcept { return lower_.rows(); }
  /// Number of stored (lower-triangle) entries.
  Index nnz() const noexcept { return lower_.nonZeros(); }
  const Storage& lower() const noexcept { return lower_; }

  double coeff(Index i, Index j) const;
  Eigen::VectorXd diagonal() const;
  Eigen::MatrixXd to_dense() const;
  Eigen::SparseMatrix<double> to_full() const;
  std::vector<Triplet> triplets() const;

  /// m * x for a vector or a matrix of column vectors.
  Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const;

  /// P m P^T.
  SparseSpd permuted(const Permutation& perm) const;
  SparseSpd scaled(double factor) const;
  double max_abs() const;
  bool has_positive_diagonal() const;

  friend SparseSpd operator+(const SparseSpd& a, const SparseSpd& b);

 private:
  explicit SparseSpd(Storage lower);
  Storage lower_;
};

/// Pattern of a Cholesky factor: for every column j, the sorted rows i > j with L(i, j) != 0.
struct SymbolicFactor {
  std::vector<std::vector<Index>> column_rows;

  Index dim() const noexcept { return static_cast<Index>(column_rows.size()); }
  /// Structural non-zeros of L, diagonal included.
  Index nnz() const noexcept;
};

/// Symbolic factorisation of the graph's matrix reordered by `perm`.
SymbolicFactor symbolic_cholesky(const CIGraph& g, const Permutation& perm);
Index cholesky_nnz(const CIGraph& g, const Permutation& perm);

/// L L^T = P m P^T with L sparse lower triangular and positive diagonal.
class CholeskyFactor {
 public:
  CholeskyFactor(Eigen::SparseMatrix<double> lower, Permutation perm);

  Index dim() const noexcept { return lower_.rows(); }
  const Eigen::SparseMatrix<double>& lower() const noexcept { return lower_; }
  const Permutation& permutation() const noexcept { return perm_; }

  /// Solves m x = rhs column by column.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  /// log det m.
  double log_determinant() const;
  /// Maps standard-normal columns z to columns with covariance m^{-1}: x = P^T L^{-T} z.
  Eigen::MatrixXd inverse_sqrt_transpose(const Eigen::MatrixXd& z) const;

 private:
  Eigen::SparseMatrix<double> lower_;
  Permutation perm_;
};

/// Pivots below 1e-12 times the largest diagonal entry are reported as NotPositiveDefinite.
inline constexpr double pivot_tolerance = 1e-12;

CholeskyFactor cholesky(const SparseSpd& m, const Permutation& perm);
/// Factorises under the default fill-reducing ordering of m's own graph.
CholeskyFactor cholesky(const SparseSpd& m);

Eigen::MatrixXd solve_spd(const SparseSpd& m, const Eigen::MatrixXd& rhs);
Eigen::VectorXd solve_spd(const SparseSpd& m, const Eigen::VectorXd& rhs);

/// Coordinate-triplet text. SparseSpd: header "p nnz", then lower entries "i j value".
void write_triplets(std::ostream& out, const SparseSpd& m);
SparseSpd read_spd_triplets(std::istream& in);
/// Rectangular matrices: header "rows cols nnz".
void write_triplets(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_matrix_triplets(std::istream& in);

}  // namespace enif
