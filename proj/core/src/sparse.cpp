#include "enif/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "enif/error.hpp"
#include "enif/ordering.hpp"

namespace enif {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr Index no_parent = -1;

// Upper-triangle column patterns of the permuted matrix: rows b < a of column a.
std::vector<std::vector<Index>> permuted_upper_pattern(const CIGraph& g, const Permutation& perm) {
  const Index p = g.size();
  const Permutation inv = perm.inverse();
  std::vector<std::vector<Index>> cols(static_cast<std::size_t>(p));
  for (Index a = 0; a < p; ++a) {
    auto& col = cols[static_cast<std::size_t>(a)];
    for (Index v : g.neighbours(perm[a])) {
      const Index b = inv[v];
      if (b < a) col.push_back(b);
    }
    std::sort(col.begin(), col.end());
  }
  return cols;
}

std::vector<Index> elimination_tree(const std::vector<std::vector<Index>>& upper) {
  const auto p = static_cast<Index>(upper.size());
  std::vector<Index> parent(static_cast<std::size_t>(p), no_parent);
  std::vector<Index> ancestor(static_cast<std::size_t>(p), no_parent);
  for (Index k = 0; k < p; ++k) {
    for (Index i : upper[static_cast<std::size_t>(k)]) {
      // Walk from i to the root of its current subtree, compressing the path to k.
      while (i != no_parent && i < k) {
        const Index next = ancestor[static_cast<std::size_t>(i)];
        ancestor[static_cast<std::size_t>(i)] = k;
        if (next == no_parent) parent[static_cast<std::size_t>(i)] = k;
        i = next;
      }
    }
  }
  return parent;
}

// Nonzero pattern of row k of L (columns < k), in topological order. `mark` must hold values != k
// for all entries on entry and is left marked with k.
void row_pattern(Index k, const std::vector<Index>& upper_col, const std::vector<Index>& parent,
                 std::vector<Index>& mark, std::vector<Index>& out) {
  out.clear();
  mark[static_cast<std::size_t>(k)] = k;
  std::vector<Index> path;
  for (Index i : upper_col) {
    path.clear();
    while (mark[static_cast<std::size_t>(i)] != k) {
      path.push_back(i);
      mark[static_cast<std::size_t>(i)] = k;
      i = parent[static_cast<std::size_t>(i)];
    }
    // Reverse the path so ancestors come after descendants once the whole list is reversed.
    out.insert(out.end(), path.rbegin(), path.rend());
  }
  std::reverse(out.begin(), out.end());
}

}  // namespace

// --- SparseSpd ---------------------------------------------------------------------------

SparseSpd::SparseSpd(Storage lower) : lower_(std::move(lower)) { lower_.makeCompressed(); }

SparseSpd SparseSpd::from_triplets(Index dim, std::span<const Triplet> triplets) {
  require(dim >= 0, ErrorCode::invalid_argument, "negative dimension");
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(triplets.size());
  for (const Triplet& t : triplets) {
    require(t.row >= 0 && t.row < dim && t.col >= 0 && t.col < dim, ErrorCode::invalid_argument,
            "triplet index out of range");
    require(std::isfinite(t.value), ErrorCode::invalid_argument, "non-finite triplet value");
    entries.emplace_back(std::max(t.row, t.col), std::min(t.row, t.col), t.value);
  }
  Storage m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  m.prune([](Index i, Index j, double v) { return i == j || v != 0.0; });
  // Keep an explicit diagonal so the stored pattern always covers it.
  for (Index j = 0; j < dim; ++j) {
    if (m.coeff(j, j) == 0.0) m.coeffRef(j, j) = 0.0;
  }
  return SparseSpd(std::move(m));
}

SparseSpd SparseSpd::from_dense(const MatrixXd& dense) {
  require(dense.rows() == dense.cols(), ErrorCode::dimension_mismatch, "matrix is not square");
  std::vector<Triplet> t;
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = j; i < dense.rows(); ++i) {
      if (i == j || dense(i, j) != 0.0) t.push_back({i, j, dense(i, j)});
    }
  }
  return from_triplets(dense.rows(), t);
}

SparseSpd SparseSpd::from_full(const Eigen::SparseMatrix<double>& full) {
  require(full.rows() == full.cols(), ErrorCode::dimension_mismatch, "matrix is not square");
  std::vector<Triplet> t;
  for (Index j = 0; j < full.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(full, j); it; ++it) {
      if (it.row() >= it.col()) t.push_back({it.row(), it.col(), it.value()});
    }
  }
  return from_triplets(full.rows(), t);
}

SparseSpd SparseSpd::identity(Index dim) { return diagonal(VectorXd::Ones(dim)); }

SparseSpd SparseSpd::diagonal(const VectorXd& diag) {
  std::vector<Triplet> t;
  for (Index i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
  return from_triplets(diag.size(), t);
}

double SparseSpd::coeff(Index i, Index j) const {
  require(i >= 0 && j >= 0 && i < dim() && j < dim(), ErrorCode::invalid_argument, "index out of range");
  return i >= j ? lower_.coeff(i, j) : lower_.coeff(j, i);
}

VectorXd SparseSpd::diagonal() const { return lower_.diagonal(); }

MatrixXd SparseSpd::to_dense() const {
  MatrixXd d = MatrixXd(lower_);
  d.triangularView<Eigen::StrictlyUpper>() = d.transpose();
  return d;
}

Eigen::SparseMatrix<double> SparseSpd::to_full() const {
  return lower_.selfadjointView<Eigen::Lower>();
}

std::vector<Triplet> SparseSpd::triplets() const {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz()));
  for (Index j = 0; j < lower_.outerSize(); ++j) {
    for (Storage::InnerIterator it(lower_, j); it; ++it) t.push_back({it.row(), it.col(), it.value()});
  }
  return t;
}

MatrixXd SparseSpd::multiply(const MatrixXd& x) const {
  require(x.rows() == dim(), ErrorCode::dimension_mismatch, "multiply: row count");
  return lower_.selfadjointView<Eigen::Lower>() * x;
}

SparseSpd SparseSpd::permuted(const Permutation& perm) const {
  require(perm.size() == dim(), ErrorCode::dimension_mismatch, "permutation size");
  const Permutation inv = perm.inverse();
  std::vector<Triplet> t = triplets();
  for (Triplet& e : t) {
    e.row = inv[e.row];
    e.col = inv[e.col];
  }
  return from_triplets(dim(), t);
}

SparseSpd SparseSpd::scaled(double factor) const {
  std::vector<Triplet> t = triplets();
  for (Triplet& e : t) e.value *= factor;
  return from_triplets(dim(), t);
}

double SparseSpd::max_abs() const {
  double m = 0.0;
  for (Index k = 0; k < lower_.nonZeros(); ++k) m = std::max(m, std::abs(lower_.valuePtr()[k]));
  return m;
}

bool SparseSpd::has_positive_diagonal() const { return (diagonal().array() > 0.0).all(); }

SparseSpd operator+(const SparseSpd& a, const SparseSpd& b) {
  require(a.dim() == b.dim(), ErrorCode::dimension_mismatch, "sum of matrices with different sizes");
  std::vector<Triplet> t = a.triplets();
  std::vector<Triplet> tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return SparseSpd::from_triplets(a.dim(), t);
}

// --- symbolic ----------------------------------------------------------------------------

Index SymbolicFactor::nnz() const noexcept {
  Index total = dim();
  for (const auto& c : column_rows) total += static_cast<Index>(c.size());
  return total;
}

SymbolicFactor symbolic_cholesky(const CIGraph& g, const Permutation& perm) {
  require(perm.size() == g.size(), ErrorCode::dimension_mismatch, "permutation size");
  const Index p = g.size();
  const auto upper = permuted_upper_pattern(g, perm);
  const auto parent = elimination_tree(upper);
  SymbolicFactor f;
  f.column_rows.resize(static_cast<std::size_t>(p));
  std::vector<Index> mark(static_cast<std::size_t>(p), no_parent);
  std::vector<Index> row;
  for (Index k = 0; k < p; ++k) {
    row_pattern(k, upper[static_cast<std::size_t>(k)], parent, mark, row);
    for (Index j : row) f.column_rows[static_cast<std::size_t>(j)].push_back(k);
  }
  return f;
}

Index cholesky_nnz(const CIGraph& g, const Permutation& perm) { return symbolic_cholesky(g, perm).nnz(); }

// --- numeric -----------------------------------------------------------------------------

CholeskyFactor::CholeskyFactor(Eigen::SparseMatrix<double> lower, Permutation perm)
    : lower_(std::move(lower)), perm_(std::move(perm)) {
  require(lower_.rows() == lower_.cols() && perm_.size() == lower_.rows(), ErrorCode::dimension_mismatch,
          "Cholesky factor and permutation sizes differ");
}

MatrixXd CholeskyFactor::solve(const MatrixXd& rhs) const {
  require(rhs.rows() == dim(), ErrorCode::dimension_mismatch, "solve: row count");
  MatrixXd x(rhs.rows(), rhs.cols());
  for (Index k = 0; k < dim(); ++k) x.row(k) = rhs.row(perm_[k]);
  lower_.triangularView<Eigen::Lower>().solveInPlace(x);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  MatrixXd out(rhs.rows(), rhs.cols());
  for (Index k = 0; k < dim(); ++k) out.row(perm_[k]) = x.row(k);
  return out;
}

double CholeskyFactor::log_determinant() const {
  double s = 0.0;
  for (Index j = 0; j < dim(); ++j) s += std::log(lower_.coeff(j, j));
  return 2.0 * s;
}

MatrixXd CholeskyFactor::inverse_sqrt_transpose(const MatrixXd& z) const {
  require(z.rows() == dim(), ErrorCode::dimension_mismatch, "inverse_sqrt_transpose: row count");
  MatrixXd y = z;
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(y);
  MatrixXd out(z.rows(), z.cols());
  for (Index k = 0; k < dim(); ++k) out.row(perm_[k]) = y.row(k);
  return out;
}

CholeskyFactor cholesky(const SparseSpd& m, const Permutation& perm) {
  const Index p = m.dim();
  require(perm.size() == p, ErrorCode::dimension_mismatch, "permutation size");
  const Permutation inv = perm.inverse();

  // Upper triangle of P m P^T, column-compressed with sorted rows.
  Eigen::SparseMatrix<double> upper(p, p);
  {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(m.nnz()));
    for (const Triplet& e : m.triplets()) {
      const Index a = inv[e.row];
      const Index b = inv[e.col];
      t.emplace_back(std::min(a, b), std::max(a, b), e.value);
    }
    upper.setFromTriplets(t.begin(), t.end());
    upper.makeCompressed();
  }

  std::vector<std::vector<Index>> upper_rows(static_cast<std::size_t>(p));
  for (Index k = 0; k < p; ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(upper, k); it; ++it) {
      if (it.row() < k) upper_rows[static_cast<std::size_t>(k)].push_back(it.row());
    }
  }
  const auto parent = elimination_tree(upper_rows);

  const double max_diag = p > 0 ? m.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double threshold = pivot_tolerance * max_diag;

  // Columns of L filled incrementally, one row per step, as in an up-looking factorisation.
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(p));
  std::vector<std::vector<double>> vals(static_cast<std::size_t>(p));
  std::vector<double> x(static_cast<std::size_t>(p), 0.0);
  std::vector<Index> mark(static_cast<std::size_t>(p), no_parent);
  std::vector<Index> pattern;

  for (Index k = 0; k < p; ++k) {
    row_pattern(k, upper_rows[static_cast<std::size_t>(k)], parent, mark, pattern);
    double d = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(upper, k); it; ++it) {
      if (it.row() < k) x[static_cast<std::size_t>(it.row())] = it.value();
      else d = it.value();
    }
    for (Index j : pattern) {
      const auto ju = static_cast<std::size_t>(j);
      const double ljk = x[ju] / vals[ju][0];
      x[ju] = 0.0;
      for (std::size_t q = 1; q < rows[ju].size(); ++q) {
        x[static_cast<std::size_t>(rows[ju][q])] -= vals[ju][q] * ljk;
      }
      d -= ljk * ljk;
      rows[ju].push_back(k);
      vals[ju].push_back(ljk);
    }
    if (!(d > threshold) || !std::isfinite(d)) {
      fail(ErrorCode::not_positive_definite,
           "matrix is not positive definite (pivot " + std::to_string(k) + " = " + std::to_string(d) + ")");
    }
    rows[static_cast<std::size_t>(k)].push_back(k);
    vals[static_cast<std::size_t>(k)].push_back(std::sqrt(d));
  }

  std::vector<Eigen::Triplet<double>> lt;
  for (Index j = 0; j < p; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    for (std::size_t q = 0; q < rows[ju].size(); ++q) lt.emplace_back(rows[ju][q], j, vals[ju][q]);
  }
  Eigen::SparseMatrix<double> lower(p, p);
  lower.setFromTriplets(lt.begin(), lt.end());
  lower.makeCompressed();
  return CholeskyFactor(std::move(lower), perm);
}

CholeskyFactor cholesky(const SparseSpd& m) { return cholesky(m, fill_reducing_order(graph_from_sparsity(m))); }

MatrixXd solve_spd(const SparseSpd& m, const MatrixXd& rhs) { return cholesky(m).solve(rhs); }

VectorXd solve_spd(const SparseSpd& m, const VectorXd& rhs) { return cholesky(m).solve(rhs); }

// --- text IO -----------------------------------------------------------------------------

namespace {

void set_precision(std::ostream& out) {
  out.precision(17);
}

template <typename T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) fail(ErrorCode::parse_error, std::string("triplet file: expected ") + what);
  return v;
}

}  // namespace

void write_triplets(std::ostream& out, const SparseSpd& m) {
  set_precision(out);
  out << m.dim() << ' ' << m.nnz() << '\n';
  for (const Triplet& t : m.triplets()) out << t.row << ' ' << t.col << ' ' << t.value << '\n';
}

SparseSpd read_spd_triplets(std::istream& in) {
  const auto p = read_value<Index>(in, "dimension");
  const auto nnz = read_value<Index>(in, "entry count");
  require(p >= 0 && nnz >= 0, ErrorCode::parse_error, "triplet file: negative header");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (Index k = 0; k < nnz; ++k) {
    Triplet e{read_value<Index>(in, "row"), read_value<Index>(in, "column"), read_value<double>(in, "value")};
    require(e.row >= 0 && e.row < p && e.col >= 0 && e.col < p, ErrorCode::parse_error,
            "triplet file: index out of range");
    t.push_back(e);
  }
  return SparseSpd::from_triplets(p, t);
}

void write_triplets(std::ostream& out, const SparseMatrix& m) {
  set_precision(out);
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (Index i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
}

SparseMatrix read_matrix_triplets(std::istream& in) {
  const auto rows = read_value<Index>(in, "row count");
  const auto cols = read_value<Index>(in, "column count");
  const auto nnz = read_value<Index>(in, "entry count");
  require(rows >= 0 && cols >= 0 && nnz >= 0, ErrorCode::parse_error, "triplet file: negative header");
  std::vector<Eigen::Triplet<double>> t;
  for (Index k = 0; k < nnz; ++k) {
    const auto i = read_value<Index>(in, "row");
    const auto j = read_value<Index>(in, "column");
    const auto v = read_value<double>(in, "value");
    require(i >= 0 && i < rows && j >= 0 && j < cols, ErrorCode::parse_error, "triplet file: index out of range");
    t.emplace_back(i, j, v);
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace enif
