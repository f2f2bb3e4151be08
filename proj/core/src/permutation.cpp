#include "enif/permutation.hpp"

#include <numeric>
#include <string>

#include "enif/error.hpp"

namespace enif {

Permutation::Permutation(std::vector<Index> order, PermutationKind kind)
    : order_(std::move(order)), kind_(kind) {
  std::vector<char> seen(order_.size(), 0);
  for (Index v : order_) {
    require(v >= 0 && v < size() && !seen[static_cast<std::size_t>(v)], ErrorCode::invalid_argument,
            "permutation is not a bijection (entry " + std::to_string(v) + ")");
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(Index n) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  return Permutation(std::move(order), PermutationKind::identity);
}

Permutation Permutation::reverse(Index n) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = n - 1 - k;
  return Permutation(std::move(order), n <= 1 ? PermutationKind::identity : PermutationKind::reverse);
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t k = 0; k < order_.size(); ++k) {
    if (order_[k] != static_cast<Index>(k)) return false;
  }
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<Index> inv(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) inv[static_cast<std::size_t>(order_[k])] = static_cast<Index>(k);
  PermutationKind kind = kind_ == PermutationKind::fill_reducing ? PermutationKind::composite : kind_;
  return Permutation(std::move(inv), kind);
}

Eigen::VectorXd Permutation::apply(const Eigen::VectorXd& x) const {
  require(x.size() == size(), ErrorCode::dimension_mismatch, "permutation/vector size");
  Eigen::VectorXd y(x.size());
  for (Index k = 0; k < size(); ++k) y[k] = x[(*this)[k]];
  return y;
}

Eigen::VectorXd Permutation::apply_inverse(const Eigen::VectorXd& y) const {
  require(y.size() == size(), ErrorCode::dimension_mismatch, "permutation/vector size");
  Eigen::VectorXd x(y.size());
  for (Index k = 0; k < size(); ++k) x[(*this)[k]] = y[k];
  return x;
}

Eigen::MatrixXd Permutation::apply_to_columns(const Eigen::MatrixXd& x) const {
  require(x.cols() == size(), ErrorCode::dimension_mismatch, "permutation/column count");
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (Index k = 0; k < size(); ++k) y.col(k) = x.col((*this)[k]);
  return y;
}

Eigen::MatrixXd Permutation::apply_inverse_to_columns(const Eigen::MatrixXd& y) const {
  require(y.cols() == size(), ErrorCode::dimension_mismatch, "permutation/column count");
  Eigen::MatrixXd x(y.rows(), y.cols());
  for (Index k = 0; k < size(); ++k) x.col((*this)[k]) = y.col(k);
  return x;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  require(outer.size() == inner.size(), ErrorCode::dimension_mismatch, "compose: permutation sizes differ");
  std::vector<Index> order(static_cast<std::size_t>(outer.size()));
  for (Index k = 0; k < outer.size(); ++k) order[static_cast<std::size_t>(k)] = inner[outer[k]];
  Permutation result(std::move(order), PermutationKind::composite);
  if (result.is_identity()) return Permutation::identity(result.size());
  return result;
}

}  // namespace enif
