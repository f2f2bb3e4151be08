#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

#include "enif/permutation.hpp"

namespace enif {

/// n x p matrix of realisations, one member per row.
class Ensemble {
 public:
  Ensemble() = default;
  /// Throws NonFinite if any entry is NaN or infinite.
  explicit Ensemble(Eigen::MatrixXd data);

  Index members() const noexcept { return data_.rows(); }
  Index dim() const noexcept { return data_.cols(); }
  const Eigen::MatrixXd& data() const noexcept { return data_; }

  Eigen::VectorXd mean() const;
  /// Members minus the ensemble mean.
  Eigen::MatrixXd anomalies() const;
  /// Sample covariance with divisor n - 1. Requires n >= 2.
  Eigen::MatrixXd covariance() const;

 private:
  Eigen::MatrixXd data_;
};

/// Column-wise sample covariance of two member-aligned matrices (divisor n - 1).
Eigen::MatrixXd sample_cross_covariance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x);

/// CSV: n lines of p comma-separated values, no header.
void write_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_csv(std::istream& in);

/// Binary: 8-byte magic "ENIFENS1", uint64 n, uint64 p (little endian), n*p doubles row-major.
void write_binary(std::ostream& out, const Ensemble& e);
Ensemble read_binary(std::istream& in);

/// Dispatch on extension: ".bin" is binary, anything else CSV.
Ensemble load_ensemble(const std::filesystem::path& path);
void save_ensemble(const std::filesystem::path& path, const Ensemble& e);
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace enif
