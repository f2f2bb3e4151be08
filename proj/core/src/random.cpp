#include "enif/random.hpp"

#include <cmath>
#include <numbers>

namespace enif {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~tag));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(splitmix64(splitmix64(seed) + stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

Eigen::VectorXd Rng::normal_vector(Index size) {
  Eigen::VectorXd z(size);
  for (Index i = 0; i < size; ++i) z[i] = normal();
  return z;
}

Eigen::MatrixXd standard_normal_rows(Index rows, Index cols, std::uint64_t seed, std::uint64_t first_stream) {
  Eigen::MatrixXd z(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    Rng rng(seed, first_stream + static_cast<std::uint64_t>(i));
    for (Index j = 0; j < cols; ++j) z(i, j) = rng.normal();
  }
  return z;
}

}  // namespace enif
