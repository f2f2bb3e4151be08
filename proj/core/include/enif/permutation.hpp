#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace enif {

using Index = Eigen::Index;

enum class PermutationKind { identity, reverse, fill_reducing, composite };

/// A bijection on {0..p-1}.
///
/// Position k of the permuted vector holds original index `order()[k]`, i.e. the permutation
/// matrix P satisfies (P x)[k] = x[order[k]] and (P A P^T)[a][b] = A[order[a]][order[b]].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<Index> order, PermutationKind kind = PermutationKind::composite);

  static Permutation identity(Index n);
  static Permutation reverse(Index n);

  Index size() const noexcept { return static_cast<Index>(order_.size()); }
  Index operator[](Index k) const { return order_[static_cast<std::size_t>(k)]; }
  std::span<const Index> order() const noexcept { return order_; }
  PermutationKind kind() const noexcept { return kind_; }
  bool is_identity() const noexcept;

  /// Returns P^T, i.e. the map with inverse()[order[k]] == k.
  Permutation inverse() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& y) const;
  /// Reorders the columns of an n x p matrix: result.col(k) = x.col(order[k]).
  Eigen::MatrixXd apply_to_columns(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd apply_inverse_to_columns(const Eigen::MatrixXd& y) const;

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.order_ == b.order_; }

 private:
  std::vector<Index> order_;
  PermutationKind kind_ = PermutationKind::identity;
};

/// Matrix product P_outer * P_inner as a permutation.
Permutation compose(const Permutation& outer, const Permutation& inner);

}  // namespace enif
