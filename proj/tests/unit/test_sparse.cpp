#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "enif/graph.hpp"
#include "enif/ordering.hpp"
#include "enif/simulators.hpp"
#include "enif/sparse.hpp"
#include "enif/transport.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"

using enif::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd reconstruct(const enif::CholeskyFactor& f) {
  const MatrixXd l(f.lower());
  return l * l.transpose();
}

MatrixXd permuted_dense(const enif::SparseSpd& m, const enif::Permutation& perm) {
  const MatrixXd a = m.to_dense();
  MatrixXd out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) out(i, j) = a(perm[i], perm[j]);
  }
  return out;
}

enif::SparseSpd ar1_prec3() {
  return enif::SparseSpd::from_dense((MatrixXd(3, 3) << 1, -0.5, 0, -0.5, 1.25, -0.5, 0, -0.5, 1).finished());
}

}  // namespace

TEST(SparseSpd, FromTripletsMirrorsAndSumsDuplicates) {
  const std::vector<enif::Triplet> t{{0, 1, 2.0}, {1, 0, 1.0}, {0, 0, 4.0}, {1, 1, 5.0}, {2, 2, 1.0}, {2, 1, 0.0}};
  const enif::SparseSpd m = enif::SparseSpd::from_triplets(3, t);
  EXPECT_EQ(m.coeff(1, 0), 3.0);
  EXPECT_EQ(m.coeff(0, 1), 3.0);
  EXPECT_EQ(m.nnz(), 4);  // explicit zero at (2, 1) is not stored
  EXPECT_TRUE(m.has_positive_diagonal());
}

TEST(SparseSpd, TripletTextRoundTrip) {
  const enif::SparseSpd m = ar1_prec3();
  std::stringstream s;
  enif::write_triplets(s, m);
  const enif::SparseSpd back = enif::read_spd_triplets(s);
  EXPECT_EQ(back.to_dense(), m.to_dense());

  enif::SparseMatrix h(2, 3);
  h.insert(0, 2) = 1.5;
  h.insert(1, 0) = -2.0;
  std::stringstream r;
  enif::write_triplets(r, h);
  const enif::SparseMatrix hb = enif::read_matrix_triplets(r);
  EXPECT_EQ(MatrixXd(hb), MatrixXd(h));
}

TEST(SparseSpd, MalformedTripletsAreParseErrors) {
  std::stringstream s("3 2\n0 0 1\n");
  EXPECT_ENIF_ERROR(enif::read_spd_triplets(s), enif::ErrorCode::parse_error);
}

TEST(Cholesky, IdentityGivesIdentityFactor) {
  const enif::CholeskyFactor f = enif::cholesky(enif::SparseSpd::identity(2), enif::Permutation::identity(2));
  EXPECT_EQ(MatrixXd(f.lower()), MatrixXd::Identity(2, 2));
}

TEST(Cholesky, Ar1PrecisionReconstructs) {
  const enif::SparseSpd m = ar1_prec3();
  const enif::CholeskyFactor f = enif::cholesky(m, enif::Permutation::identity(3));
  EXPECT_LT((reconstruct(f) - m.to_dense()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Cholesky, RandomTenByTenMatchesDenseOracle) {
  std::mt19937_64 rng(7);
  const enif::CIGraph g = oracle::random_graph(10, 0.3, rng);
  const enif::SparseSpd m = oracle::random_spd(g, rng);
  const enif::Permutation perm = enif::fill_reducing_order(g);
  const enif::CholeskyFactor f = enif::cholesky(m, perm);
  const MatrixXd pap = permuted_dense(m, perm);
  const auto dense = oracle::dense_cholesky(pap);
  ASSERT_TRUE(dense.has_value());
  EXPECT_LT((MatrixXd(f.lower()) - *dense).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((reconstruct(f) - pap).norm() / pap.norm(), 1e-10);
}

TEST(Cholesky, IndefiniteMatrixIsRejected) {
  const enif::SparseSpd m = enif::SparseSpd::from_dense((MatrixXd(2, 2) << 1, 2, 2, 1).finished());
  EXPECT_ENIF_ERROR(enif::cholesky(m, enif::Permutation::identity(2)), enif::ErrorCode::not_positive_definite);
}

TEST(Cholesky, PermutationSizeMismatch) {
  EXPECT_ENIF_ERROR(enif::cholesky(enif::SparseSpd::identity(3), enif::Permutation::identity(2)),
                    enif::ErrorCode::dimension_mismatch);
}

TEST(Cholesky, LogDeterminantMatchesDense) {
  std::mt19937_64 rng(3);
  const enif::CIGraph g = oracle::random_graph(15, 0.2, rng);
  const enif::SparseSpd m = oracle::random_spd(g, rng);
  EXPECT_NEAR(enif::cholesky(m).log_determinant(), std::log(m.to_dense().determinant()), 1e-10);
}

TEST(SolveSpd, IdentityReturnsRhs) {
  const VectorXd rhs = VectorXd::LinSpaced(4, -1.0, 2.0);
  EXPECT_EQ(enif::solve_spd(enif::SparseSpd::identity(4), rhs), rhs);
}

TEST(SolveSpd, Ar1ForwardMultiplyOracle) {
  const enif::SparseSpd m = ar1_prec3();
  const VectorXd x = (VectorXd(3) << 1, 2, 3).finished();
  const VectorXd rhs = m.to_dense() * x;
  EXPECT_LT((enif::solve_spd(m, rhs) - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveSpd, FiftyByFiftyLatticeMatchesDenseSolve) {
  std::mt19937_64 rng(11);
  const enif::CIGraph g = enif::lattice_graph(50, 50, enif::Neighbourhood::four);
  const enif::SparseSpd m = oracle::random_spd(g, rng);
  std::normal_distribution<double> z;
  VectorXd rhs(g.size());
  for (Index i = 0; i < rhs.size(); ++i) rhs[i] = z(rng);
  const VectorXd dense = m.to_dense().llt().solve(rhs);
  EXPECT_LT((enif::solve_spd(m, rhs) - dense).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SymbolicCholesky, MatchesNumericPatternAndEliminationGame) {
  std::mt19937_64 rng(5);
  const enif::CIGraph g = oracle::random_graph(30, 0.1, rng);
  const enif::Permutation perm = enif::fill_reducing_order(g);
  const enif::CholeskyFactor f = enif::cholesky(oracle::random_spd(g, rng), perm);
  const std::vector<Index> order(perm.order().begin(), perm.order().end());
  EXPECT_EQ(enif::cholesky_nnz(g, perm), oracle::elimination_fill(g, order));
  EXPECT_EQ(enif::cholesky_nnz(g, perm), f.lower().nonZeros());
}

TEST(Permutation, ComposeAndInverse) {
  const enif::Permutation p(std::vector<Index>{2, 0, 3, 1});
  EXPECT_TRUE(enif::compose(p, p.inverse()).is_identity());
  EXPECT_TRUE(enif::compose(p.inverse(), p).is_identity());
  const VectorXd x = (VectorXd(4) << 10, 11, 12, 13).finished();
  EXPECT_EQ(p.apply(x), (VectorXd(4) << 12, 10, 13, 11).finished());
  EXPECT_EQ(p.apply_inverse(p.apply(x)), x);
}

TEST(Permutation, ReverseOfReverseIsIdentity) {
  EXPECT_TRUE(enif::compose(enif::Permutation::reverse(6), enif::Permutation::reverse(6)).is_identity());
}

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(enif::Permutation(std::vector<Index>{0, 0, 1}), enif::Error);
}

// ---------------------------------------------------------------------------------------------
// Property suites: hand-rolled generators over random graphs, matrices and permutations.

TEST(SparseCoreProperty, FactorReconstructRoundTrip) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Index> size(1, 40);
  std::uniform_real_distribution<double> density(0.0, 0.4);
  for (int trial = 0; trial < 150; ++trial) {
    const Index p = size(rng);
    const enif::CIGraph g = oracle::random_graph(p, density(rng), rng);
    const enif::SparseSpd m = oracle::random_spd(g, rng);
    const enif::Permutation perm(oracle::random_order(p, rng));
    const enif::CholeskyFactor f = enif::cholesky(m, perm);
    const MatrixXd l(f.lower());
    ASSERT_TRUE(l.isLowerTriangular()) << "trial " << trial;
    ASSERT_GT(l.diagonal().minCoeff(), 0.0) << "trial " << trial;
    const double err = (l * l.transpose() - permuted_dense(m, perm)).cwiseAbs().maxCoeff();
    ASSERT_LE(err, 1e-10 * m.max_abs()) << "trial " << trial;
  }
}

TEST(SparseCoreProperty, PermutationGroupLaws) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Index p = 1 + trial % 25;
    const enif::Permutation a(oracle::random_order(p, rng));
    const enif::Permutation b(oracle::random_order(p, rng));
    const enif::Permutation c(oracle::random_order(p, rng));
    ASSERT_TRUE(enif::compose(a, a.inverse()).is_identity());
    ASSERT_EQ(enif::compose(enif::compose(a, b), c), enif::compose(a, enif::compose(b, c)));
    VectorXd x = VectorXd::LinSpaced(p, 0.0, static_cast<double>(p - 1));
    ASSERT_EQ(enif::compose(a, b).apply(x), a.apply(b.apply(x)));
  }
}

TEST(SparseCoreProperty, FillReducingOrderNeverWorseThanNatural) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> density(0.02, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    const Index p = 2 + trial % 45;
    const enif::CIGraph g = oracle::random_graph(p, density(rng), rng);
    const enif::Permutation perm = enif::fill_reducing_order(g);
    const std::vector<Index> order(perm.order().begin(), perm.order().end());
    ASSERT_LE(oracle::elimination_fill(g, order), oracle::elimination_fill(g, oracle::natural(p))) << "trial " << trial;
    ASSERT_EQ(enif::fill_reducing_order(g), perm) << "non-deterministic ordering";
  }
}

TEST(SparseCoreProperty, KrOrderFactorHasCholeskyFill) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const Index p = 2 + trial % 30;
    const enif::CIGraph g = oracle::random_graph(p, 0.15, rng);
    const enif::SparseSpd m = oracle::random_spd(g, rng);
    const enif::Permutation star = enif::fill_reducing_order(g);
    const enif::Permutation q = enif::kr_order_from_cholesky(star);
    const enif::CholeskyFactor f = enif::cholesky(m, star);
    // C = (P_r L P_r)^T is lower triangular with C^T C = Q m Q^T.
    const MatrixXd l(f.lower());
    const MatrixXd c = l.transpose().colwise().reverse().rowwise().reverse();
    ASSERT_TRUE(c.isLowerTriangular());
    ASSERT_LT((c.transpose() * c - permuted_dense(m, q)).cwiseAbs().maxCoeff(), 1e-10 * m.max_abs());
    Index kr_rows = 0;
    for (const auto& row : enif::kr_row_patterns(g, star)) kr_rows += 1 + static_cast<Index>(row.size());
    ASSERT_EQ(kr_rows, f.lower().nonZeros());
  }
}

TEST(SparseCoreProperty, SolveAgreesWithDenseSolver) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 100; ++trial) {
    const Index p = 1 + trial % 64;
    const enif::SparseSpd m = oracle::random_spd(oracle::random_graph(p, 0.2, rng), rng);
    MatrixXd rhs(p, 3);
    for (Index i = 0; i < rhs.size(); ++i) rhs.data()[i] = z(rng);
    const MatrixXd x = enif::solve_spd(m, rhs);
    ASSERT_LT((x - m.to_dense().ldlt().solve(rhs)).cwiseAbs().maxCoeff(), 1e-8);
    ASSERT_LE((m.to_dense() * x - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff(), 1e-8);
  }
}
