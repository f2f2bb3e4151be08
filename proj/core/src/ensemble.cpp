#include "enif/ensemble.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "enif/error.hpp"

namespace enif {

namespace {

constexpr std::array<char, 8> magic = {'E', 'N', 'I', 'F', 'E', 'N', 'S', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int k = 0; k < 8; ++k) b[static_cast<std::size_t>(k)] = static_cast<unsigned char>(v >> (8 * k));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t read_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) fail(ErrorCode::parse_error, "binary ensemble: truncated header");
  std::uint64_t v = 0;
  for (int k = 7; k >= 0; --k) v = (v << 8) | b[static_cast<std::size_t>(k)];
  return v;
}

}  // namespace

Ensemble::Ensemble(Eigen::MatrixXd data) : data_(std::move(data)) {
  require(data_.allFinite(), ErrorCode::non_finite, "ensemble contains non-finite values");
}

Eigen::VectorXd Ensemble::mean() const { return data_.colwise().mean().transpose(); }

Eigen::MatrixXd Ensemble::anomalies() const { return data_.rowwise() - data_.colwise().mean(); }

Eigen::MatrixXd Ensemble::covariance() const { return sample_covariance(data_); }

Eigen::MatrixXd sample_cross_covariance(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  require(x.rows() == y.rows(), ErrorCode::dimension_mismatch, "cross covariance: member counts differ");
  require(x.rows() >= 2, ErrorCode::invalid_argument, "sample covariance needs at least two members");
  const Eigen::MatrixXd xa = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd ya = y.rowwise() - y.colwise().mean();
  return xa.transpose() * ya / static_cast<double>(x.rows() - 1);
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) { return sample_cross_covariance(x, x); }

void write_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(ErrorCode::parse_error, "CSV: cannot parse '" + cell + "' on line " + std::to_string(rows.size() + 1));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::parse_error, "CSV: ragged row " + std::to_string(rows.size() + 1));
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Index>(rows.size());
  const Index p = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Eigen::MatrixXd m(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_binary(std::ostream& out, const Ensemble& e) {
  static_assert(std::endian::native == std::endian::little, "binary ensemble format assumes little endian");
  out.write(magic.data(), magic.size());
  write_u64(out, static_cast<std::uint64_t>(e.members()));
  write_u64(out, static_cast<std::uint64_t>(e.dim()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = e.data();
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()));
}

Ensemble read_binary(std::istream& in) {
  std::array<char, 8> head{};
  if (!in.read(head.data(), head.size()) || head != magic) fail(ErrorCode::parse_error, "binary ensemble: bad magic");
  const auto n = static_cast<Index>(read_u64(in));
  const auto p = static_cast<Index>(read_u64(in));
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(n, p);
  if (!in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * rm.size()))) {
    fail(ErrorCode::parse_error, "binary ensemble: truncated data");
  }
  return Ensemble(Eigen::MatrixXd(rm));
}

Ensemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  if (path.extension() == ".bin") return read_binary(in);
  return Ensemble(read_csv(in));
}

void save_ensemble(const std::filesystem::path& path, const Ensemble& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  if (path.extension() == ".bin") write_binary(out, e);
  else write_csv(out, e.data());
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
  return read_csv(in);
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot write " + path.string());
  write_csv(out, m);
}

}  // namespace enif
