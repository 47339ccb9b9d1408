#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fracbayes/forward.hpp"
#include "fracbayes/neumann_solver.hpp"
#include "fracbayes/spectral.hpp"
#include "oracles.hpp"

namespace fracbayes {
namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(const SparseMatrix& mass, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(mass.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  return Field::zero_mean(std::move(v), mass);
}

double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

class UnitLaplacian : public ::testing::Test {
 protected:
  UnitLaplacian()
      : mesh(-kPi, kPi, 1024),
        op(assemble(mesh, Coefficient::constant(1024, 1.0))),
        eig(eigendecompose(op, 64)) {}
  Mesh1D mesh;
  AssembledOperator op;
  EigenSystem eig;
};

TEST_F(UnitLaplacian, SpectrumOfNeumannLaplacianOnMinusPiPi) {
  // Neumann modes on an interval of length 2 pi: cos(k (x + pi) / 2), lambda = k^2 / 4.
  for (int k = 1; k <= 10; ++k) {
    EXPECT_NEAR(eig.eigenvalue(k - 1), k * k / 4.0, 0.01 * k * k / 4.0) << "mode " << k;
  }
}

TEST_F(UnitLaplacian, EvenModesAreCosKxWithEigenvalueKSquared) {
  for (int k = 1; k <= 10; ++k) {
    const int idx = 2 * k - 1;
    EXPECT_NEAR(eig.eigenvalue(idx), k * k, 0.01 * k * k);
    const Eigen::VectorXd c = interpolate(mesh, [k](double x) { return std::cos(k * x); });
    const Eigen::VectorXd psi = eig.eigenvector(idx);
    const double overlap = std::abs(psi.dot(op.mass * c)) / l2_norm(op.mass, c);
    EXPECT_NEAR(overlap, 1.0, 1e-6);
  }
}

TEST_F(UnitLaplacian, OrthonormalAndZeroMean) {
  EXPECT_LE(eig.orthonormality_residual(), 1e-10);
  const Eigen::VectorXd mass_ones = op.mass * Eigen::VectorXd::Ones(mesh.n_nodes());
  for (int k = 0; k < eig.size(); ++k) EXPECT_LE(std::abs(mass_ones.dot(eig.eigenvector(k))), 1e-10);
  EXPECT_GT(eig.eigenvalue(0), 0.0);
}

TEST_F(UnitLaplacian, UnitEigenvalueFixedPoint) {
  const Field f = Field::zero_mean(interpolate(mesh, [](double x) { return std::cos(x); }), op.mass);
  const Eigen::VectorXd expected = interpolate(mesh, [](double x) { return std::cos(x); });
  for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    EXPECT_LE(sup_diff(fractional_solve(eig, f, s).values(), expected), 2e-3) << "s = " << s;
  }
}

TEST_F(UnitLaplacian, SingleModeCos2x) {
  const Field f = Field::zero_mean(interpolate(mesh, [](double x) { return std::cos(2 * x); }), op.mass);
  const Eigen::VectorXd expected = interpolate(mesh, [](double x) { return 0.5 * std::cos(2 * x); });
  EXPECT_LE(sup_diff(fractional_solve(eig, f, 0.5).values(), expected), 2e-3);
}

TEST_F(UnitLaplacian, InversePairAndIdentity) {
  const Field f = random_field(op.mass, 5);
  const Field projected = eig.project(f.values());
  for (double s : {0.0, 0.3, 0.7, 1.0}) {
    const Field back = fractional_apply(eig, fractional_solve(eig, f, s), s);
    EXPECT_LE(sup_diff(back.values(), projected.values()), 1e-10 * projected.values().cwiseAbs().maxCoeff());
  }
  EXPECT_LE(sup_diff(fractional_apply(eig, f, 0.0).values(), projected.values()), 1e-12);
}

TEST_F(UnitLaplacian, SemigroupInRetainedBasis) {
  const Field f = random_field(op.mass, 6);
  const double pairs[][2] = {{0.2, 0.3}, {0.5, 0.5}, {0.1, 0.85}};
  for (const auto& p : pairs) {
    const Field twice = fractional_solve(eig, fractional_solve(eig, f, p[0]), p[1]);
    const Field once = fractional_solve(eig, f, p[0] + p[1]);
    EXPECT_LE(sup_diff(twice.values(), once.values()), 1e-10 * once.values().cwiseAbs().maxCoeff());
  }
}

TEST_F(UnitLaplacian, SeminormOfFirstModeAndZeroOrder) {
  const Field psi1 = Field::trusted(eig.eigenvector(0));
  for (double s : {0.0, 0.4, 1.0}) {
    EXPECT_NEAR(hs_seminorm(eig, psi1, s), std::pow(eig.eigenvalue(0), s / 2), 1e-12);
  }
  const Field f = random_field(op.mass, 9);
  const Field projected = eig.project(f.values());
  EXPECT_NEAR(hs_seminorm(eig, f, 0.0), l2_norm(op.mass, projected.values()), 1e-10);
}

TEST_F(UnitLaplacian, SeminormBoundOnRandomSources) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Field f = random_field(op.mass, 100 + seed);
    const double s = 0.05 * static_cast<double>(seed);
    const Field p = fractional_solve(eig, f, s);
    EXPECT_LE(hs_seminorm(eig, p, s),
              std::pow(eig.eigenvalue(0), -s / 2) * l2_norm(op.mass, f.values()) * (1 + 1e-12));
  }
}

TEST_F(UnitLaplacian, RejectsOrderOutsideUnitInterval) {
  const Field f = random_field(op.mass, 1);
  EXPECT_THROW(fractional_solve(eig, f, -0.1), std::invalid_argument);
  EXPECT_THROW(fractional_solve(eig, f, 1.1), std::invalid_argument);
  EXPECT_THROW(fractional_apply(eig, f, 1.5), std::invalid_argument);
}

TEST(Eigendecompose, RejectsTooManyModes) {
  const Mesh1D mesh(0.0, 1.0, 8);
  const AssembledOperator op = assemble(mesh, Coefficient::constant(8, 1.0));
  EXPECT_THROW(eigendecompose(op, 9), std::invalid_argument);
  EXPECT_THROW(eigendecompose(op, 0), std::invalid_argument);
  EXPECT_NO_THROW(eigendecompose(op, 8));
}

TEST(Eigendecompose, ConstantCoefficientScalesSpectrum) {
  const Mesh1D mesh(-kPi, kPi, 128);
  const EigenSystem one = eigendecompose(assemble(mesh, Coefficient::constant(128, 1.0)), 12);
  const EigenSystem three = eigendecompose(assemble(mesh, Coefficient::constant(128, 3.0)), 12);
  for (int k = 0; k < 12; ++k) {
    EXPECT_NEAR(three.eigenvalue(k), 3.0 * one.eigenvalue(k), 1e-10 * three.eigenvalue(k));
    EXPECT_LE(sup_diff(three.eigenvector(k), one.eigenvector(k)), 1e-8);
  }
}

TEST(Eigendecompose, MatchesDenseOracleForPiecewiseCoefficient) {
  const int n = 512;
  const Mesh1D mesh(-kPi, kPi, n);
  std::vector<double> cells(n, 1.0);
  for (int c = n / 2; c < n; ++c) cells[c] = 4.0;
  const AssembledOperator op = assemble(mesh, Coefficient(cells));
  const EigenSystem eig = eigendecompose(op, 5);
  const oracle::DenseEigen dense = oracle::dense_generalized_eigen(op.stiffness, op.mass);
  for (int k = 0; k < 5; ++k) {
    EXPECT_NEAR(eig.eigenvalue(k), dense.values[k], 1e-8 * dense.values[k]);
    const Eigen::VectorXd ref = dense.vectors.col(k);
    const double sign = ref.dot(op.mass * eig.eigenvector(k)) >= 0 ? 1.0 : -1.0;
    EXPECT_LE(l2_norm(op.mass, eig.eigenvector(k) - sign * ref), 1e-8);
  }
}

TEST(Eigendecompose, RayleighCharacterizationOfFirstEigenvalue) {
  const int n = 200;
  const Mesh1D mesh(0.0, 2.0, n);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  std::vector<double> cells(n);
  for (auto& c : cells) c = u(rng);
  const AssembledOperator op = assemble(mesh, Coefficient(cells));
  const EigenSystem eig = eigendecompose(op, 4);
  const Eigen::VectorXd psi = eig.eigenvector(0);
  EXPECT_NEAR(psi.dot(op.stiffness * psi) / psi.dot(op.mass * psi), eig.eigenvalue(0),
              1e-8 * eig.eigenvalue(0));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Field v = random_field(op.mass, seed);
    const double rq = v.values().dot(op.stiffness * v.values()) / v.values().dot(op.mass * v.values());
    EXPECT_GE(rq, eig.eigenvalue(0) * (1 - 1e-12));
  }
}

TEST(Eigendecompose, FirstEigenvalueMonotoneInCoefficient) {
  const int n = 96;
  const Mesh1D mesh(-kPi, kPi, n);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(n), b(n);
    for (int c = 0; c < n; ++c) {
      a[c] = u(rng);
      b[c] = a[c] + 0.5 * u(rng);
    }
    const double lo = eigendecompose(assemble(mesh, Coefficient(a)), 1).eigenvalue(0);
    const double hi = eigendecompose(assemble(mesh, Coefficient(b)), 1).eigenvalue(0);
    EXPECT_GE(hi, lo);
  }
}

TEST(Eigendecompose, FirstOrderAgreesWithDirectSolveOnFullBasis) {
  const int n = 64;
  const Mesh1D mesh(-kPi, kPi, n);
  std::vector<double> cells(n);
  for (int c = 0; c < n; ++c) cells[c] = 1.0 + 0.5 * std::sin(mesh.midpoint(c));
  const AssembledOperator op = assemble(mesh, Coefficient(cells));
  const EigenSystem eig = eigendecompose(op, n);  // n_nodes - 1 modes
  const NeumannSolver direct(op);
  const Field f = random_field(op.mass, 77);
  const Eigen::VectorXd spectral = fractional_solve(eig, f, 1.0).values();
  const Eigen::VectorXd reference = direct.apply_inverse(f.values());
  EXPECT_LE(l2_norm(op.mass, spectral - reference), 1e-8 * l2_norm(op.mass, reference));
}

TEST(Eigendecompose, ToySeriesAtModerateResolution) {
  const Mesh1D mesh(-kPi, kPi, 512);
  const EigenSystem eig = eigendecompose(assemble(mesh, Coefficient::constant(512, 1.0)), 256);
  const Field f = analytic_source_field(0.5, mesh);
  const Field p = fractional_solve(eig, f, 0.7);
  double err = 0.0;
  for (int i = 0; i < mesh.n_nodes(); i += 4) {
    err = std::max(err, std::abs(p[i] - oracle::series_solution(0.5, 0.7, mesh.node(i), 20000)));
  }
  EXPECT_LE(err, 1e-3);
}

TEST(Field, CheckedRejectsNonzeroMean) {
  const Mesh1D mesh(0.0, 1.0, 10);
  const SparseMatrix mass = assemble_mass(mesh);
  EXPECT_THROW(Field::checked(Eigen::VectorXd::Ones(11), mass), std::invalid_argument);
  EXPECT_NO_THROW(Field::checked(Field::zero_mean(Eigen::VectorXd::LinSpaced(11, 0, 1), mass).values(), mass));
}

TEST(EigenCsv, HeaderAndEigenvalueRow) {
  const Mesh1D mesh(0.0, 1.0, 4);
  const EigenSystem eig = eigendecompose(assemble(mesh, Coefficient::constant(4, 1.0)), 2);
  std::ostringstream out;
  write_eigen_csv(out, eig, mesh);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,mode_1,mode_2");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("lambda,", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, mesh.n_nodes());
}

}  // namespace
}  // namespace fracbayes
