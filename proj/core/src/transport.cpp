#include "enif/transport.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>

#include "enif/error.hpp"
#include "enif/ordering.hpp"

namespace enif {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::vector<Index>> kr_row_patterns(const CIGraph& graph, const Permutation& cholesky_order) {
  const Index p = graph.size();
  const SymbolicFactor l = symbolic_cholesky(graph, cholesky_order);
  // C = (P_r L P_r)^T: C(j, k) != 0 iff L(p-1-k, p-1-j) != 0.
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    auto& r = rows[static_cast<std::size_t>(j)];
    for (Index i : l.column_rows[static_cast<std::size_t>(p - 1 - j)]) r.push_back(p - 1 - i);
    std::sort(r.begin(), r.end());
  }
  return rows;
}

KRMap fit_affine_kr(const Ensemble& ens, const CIGraph& graph, const KrFitOptions& options) {
  const Index n = ens.members();
  const Index p = ens.dim();
  require(graph.size() == p, ErrorCode::dimension_mismatch,
          "graph has " + std::to_string(graph.size()) + " vertices but ensemble has " + std::to_string(p) + " variables");
  require(n >= 2, ErrorCode::invalid_argument, "fitting a transport map needs at least two members");

  Permutation chol = options.cholesky_order ? *options.cholesky_order : fill_reducing_order(graph);
  require(chol.size() == p, ErrorCode::dimension_mismatch, "Cholesky ordering size");
  const Permutation order = kr_order_from_cholesky(chol);
  const auto patterns = kr_row_patterns(graph, chol);

  KRMap map;
  map.mean = ens.mean();
  const MatrixXd z = order.apply_to_columns(ens.anomalies());
  const double divisor = options.residual_scale == ResidualScale::sample_covariance ? static_cast<double>(n - 1)
                                                                                       : static_cast<double>(n);

  std::vector<Eigen::Triplet<double>> entries;
  for (Index j = 0; j < p; ++j) {
    const auto& preds = patterns[static_cast<std::size_t>(j)];
    const auto k = static_cast<Index>(preds.size());
    if (k >= n - 1) {
      fail(ErrorCode::underdetermined_row, "row " + std::to_string(j) + " has " + std::to_string(k) +
                                               " predictors but only " + std::to_string(n) +
                                               " members; use a sparser graph or more members");
    }
    const VectorXd y = z.col(j);
    VectorXd resid = y;
    VectorXd beta;
    if (k > 0) {
      MatrixXd x(n, k);
      for (Index q = 0; q < k; ++q) x.col(q) = z.col(preds[static_cast<std::size_t>(q)]);
      const MatrixXd gram = x.transpose() * x;
      Eigen::LLT<MatrixXd> llt(gram);
      if (llt.info() != Eigen::Success) {
        fail(ErrorCode::underdetermined_row, "row " + std::to_string(j) + ": predictors are collinear");
      }
      beta = llt.solve(x.transpose() * y);
      resid -= x * beta;
    }
    const double s = std::sqrt(resid.squaredNorm() / divisor);
    const double scale = std::sqrt(y.squaredNorm() / divisor);
    if (!(s > 1e-12 * std::max(scale, 1.0)) || !std::isfinite(s)) {
      fail(ErrorCode::zero_residual, "row " + std::to_string(j) + " (variable " + std::to_string(order[j]) +
                                         ") has no residual variance; the ensemble may have collapsed");
    }
    entries.emplace_back(j, j, 1.0 / s);
    for (Index q = 0; q < k; ++q) entries.emplace_back(j, preds[static_cast<std::size_t>(q)], -beta[q] / s);
  }
  map.C.resize(p, p);
  map.C.setFromTriplets(entries.begin(), entries.end());
  map.C.makeCompressed();
  map.order = order;
  map.cholesky_order = std::move(chol);
  map.graph = graph;
  return map;
}

MatrixXd KRMap::forward(const Ensemble& ens) const {
  require(ens.dim() == dim(), ErrorCode::dimension_mismatch, "ensemble/map dimension");
  const MatrixXd centred = ens.data().rowwise() - mean.transpose();
  return order.apply_to_columns(centred) * SparseMatrix(C.transpose());
}

SparseSpd unwrap_precision(const KRMap& map) {
  const Eigen::SparseMatrix<double> c(map.C);
  const Eigen::SparseMatrix<double> ctc = Eigen::SparseMatrix<double>(c.transpose()) * c;
  std::vector<Triplet> t;
  for (Index b = 0; b < ctc.outerSize(); ++b) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(ctc, b); it; ++it) {
      if (it.row() >= it.col()) t.push_back({map.order[it.row()], map.order[it.col()], it.value()});
    }
  }
  return SparseSpd::from_triplets(map.dim(), t);
}

double gaussian_nll(const Ensemble& ens, const SparseSpd& prec, const VectorXd& mean) {
  require(ens.dim() == prec.dim() && mean.size() == prec.dim(), ErrorCode::dimension_mismatch,
          "NLL: ensemble, precision and mean sizes differ");
  const CholeskyFactor f = cholesky(prec);
  const MatrixXd centred = ens.data().rowwise() - mean.transpose();
  const MatrixXd lc = prec.multiply(centred.transpose());
  const double quad = (centred.transpose().array() * lc.array()).sum() / static_cast<double>(ens.members());
  const double p = static_cast<double>(prec.dim());
  return 0.5 * (p * std::log(2.0 * std::numbers::pi) - f.log_determinant() + quad);
}

namespace {

template <typename T>
T read_token(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) fail(ErrorCode::parse_error, std::string("KR map: expected ") + what);
  return v;
}

void write_order(std::ostream& out, const Permutation& perm) {
  for (Index k = 0; k < perm.size(); ++k) out << (k ? " " : "") << perm[k];
  out << '\n';
}

Permutation read_order(std::istream& in, Index p) {
  std::vector<Index> o(static_cast<std::size_t>(p));
  for (auto& v : o) v = read_token<Index>(in, "permutation entry");
  return Permutation(std::move(o));
}

}  // namespace

void write_kr_map(std::ostream& out, const KRMap& map) {
  out.precision(17);
  out << "enif-kr-map 1\n" << map.dim() << '\n';
  write_order(out, map.order);
  write_order(out, map.cholesky_order);
  for (Index k = 0; k < map.mean.size(); ++k) out << (k ? " " : "") << map.mean[k];
  out << '\n';
  write_triplets(out, map.C);
  write_edge_list(out, map.graph);
}

KRMap read_kr_map(std::istream& in) {
  if (read_token<std::string>(in, "header") != "enif-kr-map" || read_token<int>(in, "version") != 1) {
    fail(ErrorCode::parse_error, "KR map: unknown header");
  }
  const auto p = read_token<Index>(in, "dimension");
  KRMap map;
  map.order = read_order(in, p);
  map.cholesky_order = read_order(in, p);
  map.mean.resize(p);
  for (Index k = 0; k < p; ++k) map.mean[k] = read_token<double>(in, "mean entry");
  map.C = read_matrix_triplets(in);
  map.graph = read_edge_list(in);
  require(map.C.rows() == p && map.C.cols() == p && map.graph.size() == p, ErrorCode::parse_error,
          "KR map: block sizes disagree");
  return map;
}

}  // namespace enif
