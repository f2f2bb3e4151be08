#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "enif/permutation.hpp"

namespace enif {

/// Deterministic, platform-independent random stream.
///
/// The engine is std::mt19937_64 seeded with splitmix64(seed) mixed with the stream id, so
/// member i of an ensemble drawn with `seed` uses stream i and is reproducible on its own.
/// Normals use the Box-Muller transform rather than std::normal_distribution, whose output
/// differs between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  Eigen::VectorXd normal_vector(Index size);

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// rows x cols standard normals; row i is drawn from stream `first_stream + i`.
Eigen::MatrixXd standard_normal_rows(Index rows, Index cols, std::uint64_t seed, std::uint64_t first_stream = 0);

/// Seed for an independent sub-experiment (e.g. one replicate or one MDA step).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace enif
