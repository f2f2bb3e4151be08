#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "enif/ensemble.hpp"
#include "enif/fem.hpp"
#include "enif/graph.hpp"
#include "enif/simulators.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"

using enif::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double correlation(const MatrixXd& x, Index a, Index b) {
  const MatrixXd c = enif::sample_covariance(x);
  return c(a, b) / std::sqrt(c(a, a) * c(b, b));
}

}  // namespace

TEST(Ar1Oracle, Examples) {
  const enif::GaussianOracle white = enif::ar1_oracle(4, 0.0);
  EXPECT_EQ(white.cov, MatrixXd::Identity(4, 4));
  EXPECT_EQ(white.prec->to_dense(), MatrixXd::Identity(4, 4));

  const MatrixXd expected = (MatrixXd(3, 3) << 1, -0.5, 0, -0.5, 1.25, -0.5, 0, -0.5, 1).finished();
  EXPECT_LT((enif::ar1_oracle(3, 0.5).prec->to_dense() - expected).cwiseAbs().maxCoeff(), 1e-15);

  EXPECT_NEAR(enif::ar1_oracle(10, 0.9).cov(0, 9), std::pow(0.9, 9) / (1 - 0.81), 1e-12);
  EXPECT_ENIF_ERROR(enif::ar1_oracle(5, 1.0), enif::ErrorCode::non_stationary);
}

TEST(Ar1Oracle, CovarianceTimesPrecisionIsIdentity) {
  for (double phi : {-0.8, 0.3, 0.95}) {
    for (Index p : {1, 7, 200}) {
      const enif::GaussianOracle o = enif::ar1_oracle(p, phi, 2.5);
      EXPECT_LT((o.cov * o.prec->to_dense() - MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_LT((o.cov - oracle::ar1_cov(p, phi, 2.5)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Ar1Sample, Examples) {
  const enif::Ensemble two = enif::ar1_sample(5, 0.5, 2, 3);
  EXPECT_NE(two.data().row(0), two.data().row(1));

  const enif::Ensemble e = enif::ar1_sample(6, 0.5, 10000, 4);
  EXPECT_NEAR(correlation(e.data(), 2, 3), 0.5, 0.02);
  const enif::Ensemble w = enif::ar1_sample(6, 0.0, 10000, 5);
  for (Index j = 1; j < 6; ++j) EXPECT_NEAR(correlation(w.data(), 0, j), 0.0, 0.03);
}

TEST(Ar1Sample, IsReproducible) {
  EXPECT_EQ(enif::ar1_sample(9, 0.7, 20, 42).data(), enif::ar1_sample(9, 0.7, 20, 42).data());
  EXPECT_NE(enif::ar1_sample(9, 0.7, 20, 42).data(), enif::ar1_sample(9, 0.7, 20, 43).data());
}

TEST(Matern1Gain, Examples) {
  const VectorXd pos = (VectorXd(3) << 0.0, 0.1, 50.0).finished();
  const VectorXd gain = enif::matern1_exact_gain(0.1, 1.0, pos, 0.0);
  EXPECT_NEAR(gain[1], 0.1 * std::exp(-1.0) / 2.1, 1e-15);
  EXPECT_LT(gain[2], 1e-100);
  const VectorXd at = enif::matern1_exact_gain(0.1, 0.0, VectorXd::Zero(1), 0.0);
  EXPECT_DOUBLE_EQ(at[0], 1.0);
}

TEST(OuEuler, Examples) {
  EXPECT_DOUBLE_EQ(enif::ou_euler_model(1.0, 1.0, 5).phi, 0.0);
  EXPECT_NEAR(enif::ou_euler_model(1.0, 0.1, 5).phi, 0.9, 1e-15);
  EXPECT_ENIF_ERROR(enif::ou_euler_model(1.0, 1.5, 5), enif::ErrorCode::unstable_step);
  EXPECT_ENIF_ERROR(enif::ou_euler_model(1.0, 0.0, 5), enif::ErrorCode::unstable_step);

  const enif::OuEuler model = enif::ou_euler_model(1.0, 0.01, 100);
  const enif::Ensemble e = enif::ou_euler_sample(1.0, 0.01, 100, 5000, 6);
  const MatrixXd c = e.covariance();
  for (Index j : {0, 50, 99}) EXPECT_NEAR(c(j, j) / model.oracle.cov(j, j), 1.0, 0.05);
}

TEST(OuAnalytic, StationaryCovariance) {
  const enif::GaussianOracle o = enif::ou_analytic_oracle(1.0, 0.1, 20);
  EXPECT_NEAR(o.cov(3, 8), 0.5 * std::exp(-0.5), 1e-15);
  EXPECT_LT((o.cov * o.prec->to_dense() - MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Lorenz96, FixedPoints) {
  const enif::Ensemble zero(MatrixXd::Zero(2, 40));
  EXPECT_EQ(enif::lorenz96_integrate(zero, 0.0, 0.01, 1.0, enif::IntegratorScheme::rk4).data(), zero.data());
  const enif::Ensemble f(MatrixXd::Constant(2, 40, 8.0));
  EXPECT_EQ(enif::lorenz96_integrate(f, 8.0, 0.01, 1.0, enif::IntegratorScheme::rk4).data(), f.data());
  EXPECT_EQ(enif::lorenz96_integrate(f, 8.0, 0.01, 1.0, enif::IntegratorScheme::euler).data(), f.data());
}

TEST(Lorenz96, TendencyUsesCyclicIndices) {
  VectorXd x = VectorXd::LinSpaced(5, 1.0, 5.0);
  const VectorXd dx = enif::lorenz96_tendency(x, 8.0);
  // j = 0: (x_1 - x_{-2}) x_{-1} - x_0 + F = (2 - 4) * 5 - 1 + 8
  EXPECT_DOUBLE_EQ(dx[0], -3.0);
  // j = 4: (x_0 - x_2) x_3 - x_4 + F = (1 - 3) * 4 - 5 + 8
  EXPECT_DOUBLE_EQ(dx[4], -5.0);
}

TEST(Lorenz96, Rk4StepHalving) {
  const enif::Ensemble init = enif::lorenz96_initial(3, 40, 7, 1.0);
  const auto run = [&](double dt) {
    return enif::lorenz96_integrate(init, 8.0, dt, 0.5, enif::IntegratorScheme::rk4).data();
  };
  const MatrixXd fine = run(0.00025);
  EXPECT_LT((run(0.01) - run(0.001)).cwiseAbs().maxCoeff(), 1e-4);
  const double e1 = (run(0.02) - fine).cwiseAbs().maxCoeff();
  const double e2 = (run(0.01) - fine).cwiseAbs().maxCoeff();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Lorenz96, BlowUpIsNonFinite) {
  const enif::Ensemble init(MatrixXd::Constant(1, 8, 1e6) + MatrixXd::Random(1, 8));
  EXPECT_ENIF_ERROR(enif::lorenz96_integrate(init, 8.0, 1.0, 50.0, enif::IntegratorScheme::euler),
                    enif::ErrorCode::non_finite);
}

TEST(Grf, CorrelationKernel) {
  const enif::GrfModel iso{10, 10, 0.2, 0.2, 0.0};
  EXPECT_DOUBLE_EQ(enif::grf_correlation(iso, 0.0, 0.0), 1.0);
  EXPECT_NEAR(enif::grf_correlation(iso, 0.3, 0.4), std::exp(-0.5 / 0.2), 1e-15);
  const enif::GrfModel aniso{10, 10, 0.3, 0.1, 0.0};
  EXPECT_NEAR(enif::grf_correlation(aniso, 0.3, 0.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(enif::grf_correlation(aniso, 0.0, 0.1), std::exp(-1.0), 1e-15);
  const enif::GrfModel rotated{10, 10, 0.3, 0.1, M_PI / 2};
  EXPECT_NEAR(enif::grf_correlation(rotated, 0.0, 0.3), std::exp(-1.0), 1e-15);
}

TEST(Grf, SampleMeanAndOracleLimit) {
  const enif::GrfModel model{10, 10, 0.3, 0.1, 0.0};
  const enif::Ensemble e = enif::grf_sample(model, 100, 9);
  EXPECT_LT(e.mean().cwiseAbs().maxCoeff(), 3.0 / std::sqrt(100.0) * 1.5);
  Index outside = 0;
  for (Index j = 0; j < 100; ++j) outside += std::abs(e.mean()[j]) > 3.0 / 10.0;
  EXPECT_LE(outside, 2);
  EXPECT_EQ(e.data(), enif::grf_sample(model, 100, 9).data());
  EXPECT_ENIF_ERROR(enif::grf_covariance(enif::GrfModel{65, 64, 0.3, 0.1, 0.0}),
                    enif::ErrorCode::grid_too_large_for_oracle);
}

TEST(SimulatorProperty, SampleCovarianceWithinCltEnvelope) {
  const Index n = 10000;
  const enif::GaussianOracle o = enif::ar1_oracle(8, 0.6);
  const MatrixXd c = enif::sample_gaussian(o, n, 11).covariance();
  for (Index i = 0; i < 8; i += 3) {
    for (Index j = i; j < 8; j += 2) {
      const double rho = o.cov(i, j) / std::sqrt(o.cov(i, i) * o.cov(j, j));
      const double envelope = 3.0 * std::sqrt((1.0 + rho * rho) / n) * std::sqrt(o.cov(i, i) * o.cov(j, j));
      EXPECT_LT(std::abs(c(i, j) - o.cov(i, j)), envelope) << i << "," << j;
    }
  }
}

TEST(SimulatorProperty, SeedsAreReproducibleAcrossSamplers) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ASSERT_EQ(enif::ou_euler_sample(1.0, 0.2, 12, 7, seed).data(), enif::ou_euler_sample(1.0, 0.2, 12, 7, seed).data());
    ASSERT_EQ(enif::lorenz96_initial(4, 13, seed).data(), enif::lorenz96_initial(4, 13, seed).data());
    ASSERT_EQ(enif::grf_sample({4, 5, 0.3, 0.1, 0.4}, 6, seed).data(), enif::grf_sample({4, 5, 0.3, 0.1, 0.4}, 6, seed).data());
  }
}

TEST(EnsembleIo, CsvAndBinaryRoundTrip) {
  const enif::Ensemble e = enif::ar1_sample(4, 0.3, 5, 1);
  std::stringstream csv;
  enif::write_csv(csv, e.data());
  EXPECT_LT((enif::read_csv(csv) - e.data()).cwiseAbs().maxCoeff(), 1e-15);
  std::stringstream bin;
  enif::write_binary(bin, e);
  EXPECT_EQ(enif::read_binary(bin).data(), e.data());
  std::stringstream bad("1,2\n3\n");
  EXPECT_ENIF_ERROR(enif::read_csv(bad), enif::ErrorCode::parse_error);
}

// ---------------------------------------------------------------------------------------------
// Finite elements

TEST(Fem, SingleRightTriangleGoldens) {
  const enif::TriangleVertices v = (enif::TriangleVertices() << 0, 0, 1, 0, 0, 1).finished();
  const double area = enif::signed_area(v);
  EXPECT_DOUBLE_EQ(area, 0.5);
  const Eigen::Matrix3d mass = enif::local_mass(area);
  const Eigen::Matrix3d expected = (Eigen::Matrix3d() << 2, 1, 1, 1, 2, 1, 1, 1, 2).finished() / 24.0;
  EXPECT_LT((mass - expected).cwiseAbs().maxCoeff(), 1e-16);
  const Eigen::Matrix3d lumped = enif::local_lumped_mass(area);
  EXPECT_LT((lumped - Eigen::Matrix3d::Identity() / 6.0).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_LT((mass.rowwise().sum() - lumped.diagonal()).cwiseAbs().maxCoeff(), 1e-16);
  const Eigen::Matrix3d k = enif::local_stiffness(v, 1.0);
  const Eigen::Matrix3d k_expected = (Eigen::Matrix3d() << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5).finished();
  EXPECT_LT((k - k_expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fem, DegenerateElement) {
  const enif::TriangleVertices v = (enif::TriangleVertices() << 0, 0, 1, 1, 2, 2).finished();
  EXPECT_ENIF_ERROR(enif::local_stiffness(v, 1.0), enif::ErrorCode::degenerate_element);
}

TEST(Fem, AssembledMatricesOnRectangle) {
  const enif::TriangleMesh mesh = enif::rectangle_mesh(5, 4, 2.0, 1.0);
  const enif::FemMatrices fem = enif::assemble_fem(mesh, 0.7);
  const MatrixXd a = fem.stiffness.to_dense();
  EXPECT_LT(a.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(fem.mass.to_dense().sum(), 2.0, 1e-12);
  EXPECT_LT((fem.mass.to_dense().rowwise().sum() - fem.lumped_mass.diagonal()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE(enif::graph_from_sparsity(fem.stiffness).is_subgraph_of(enif::mesh_graph(mesh)));
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(a).eigenvalues().minCoeff(), -1e-12);
}

TEST(Fem, HeatTransitionAndSmoothingPrecision) {
  const enif::TriangleMesh mesh = enif::rectangle_mesh(3, 3);
  const double dt = 0.02, sigma = 0.5;
  const enif::HeatModel model = enif::fem_heat_assemble(mesh, 1.0, sigma, dt);
  const Index s = mesh.node_count();
  const MatrixXd mt = model.fem.lumped_mass.to_dense();
  const MatrixXd b = MatrixXd::Identity(s, s) - dt * mt.inverse() * model.fem.stiffness.to_dense();
  EXPECT_LT((MatrixXd(model.transition) - b).cwiseAbs().maxCoeff(), 1e-12);
  const MatrixXd q = mt / (sigma * dt * sigma * dt);
  EXPECT_LT((model.innovation_precision.to_dense() - q).cwiseAbs().maxCoeff(), 1e-9);

  // Dense oracle: forward recursion u_1 ~ N(0, Q^-1), u_{t+1} = B u_t + w_t.
  const Index blocks = 3;
  const MatrixXd w = q.inverse();
  MatrixXd joint = MatrixXd::Zero(blocks * s, blocks * s);
  std::vector<MatrixXd> marg{w};
  for (Index t = 1; t < blocks; ++t) marg.push_back(b * marg.back() * b.transpose() + w);
  for (Index t = 0; t < blocks; ++t) {
    MatrixXd prop = MatrixXd::Identity(s, s);
    for (Index u = t; u < blocks; ++u) {
      joint.block(u * s, t * s, s, s) = prop * marg[static_cast<std::size_t>(t)];
      joint.block(t * s, u * s, s, s) = joint.block(u * s, t * s, s, s).transpose();
      prop = b * prop;
    }
  }
  const MatrixXd prec = enif::smoothing_precision(model, blocks).to_dense();
  EXPECT_LT((prec * joint - MatrixXd::Identity(blocks * s, blocks * s)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Fem, MaternPrecisionOneDimensionalCorrelations) {
  const Index p = 50;
  const double length = 10.0, kappa = 1.0;
  const enif::FemMatrices fem = enif::assemble_fem(enif::uniform_interval_mesh(p, length));
  const double h = length / static_cast<double>(p - 1);
  for (int alpha : {1, 2}) {
    const MatrixXd cov = enif::matern_fem_precision(kappa, fem, alpha).to_dense().inverse();
    const Index centre = p / 2;
    for (Index lag = 1; lag < 8; ++lag) {
      const double r = kappa * h * static_cast<double>(lag);
      const double expected = alpha == 1 ? std::exp(-r) : (1.0 + r) * std::exp(-r);
      const double corr = cov(centre, centre + lag) / std::sqrt(cov(centre, centre) * cov(centre + lag, centre + lag));
      EXPECT_NEAR(corr, expected, 0.05) << "alpha " << alpha << " lag " << lag;
    }
  }
}

TEST(Fem, MaternPrecisionLargeKappaDecorrelates) {
  const enif::FemMatrices fem = enif::assemble_fem(enif::rectangle_mesh(4, 4));
  const enif::SparseSpd prec = enif::matern_fem_precision(1e3, fem);
  const MatrixXd cov = prec.to_dense().inverse();
  EXPECT_LT(std::abs(cov(5, 6)) / std::sqrt(cov(5, 5) * cov(6, 6)), 1e-3);
  EXPECT_NO_THROW(enif::cholesky(prec));
  EXPECT_TRUE(enif::graph_from_sparsity(prec).edge_count() > enif::mesh_graph(enif::rectangle_mesh(4, 4)).edge_count());
}
