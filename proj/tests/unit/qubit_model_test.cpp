#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "superres/qubit_model.hpp"

using namespace superres;
using Eigen::Matrix2d;

namespace {

const PsfFamily kG = PsfFamily::gaussian();
const PsfFamily kS = PsfFamily::sinc_aperture();

double max_abs(const Matrix2d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(QubitState, AlignedSingleSource) {
  for (PsfFamily f : {kG, kS})
    for (auto c : {QubitConvention::Exact, QubitConvention::BlochApprox})
      EXPECT_LT(max_abs(qubit_state(Hypothesis::H1, 0.0, 0.3, f, c).matrix() -
                        (Matrix2d() << 1, 0, 0, 0).finished()), 1e-15);
}

TEST(QubitState, ExactExample) {
  Matrix2d want;
  want << 1, -0.2, -0.2, 0.04;
  want /= 1.04;
  EXPECT_LT(max_abs(qubit_state(Hypothesis::H2, 0.4, 0.0, kG, QubitConvention::Exact).matrix() - want), 1e-15);
}

TEST(QubitState, BlochApproxExample) {
  Matrix2d want;
  want << 0.9375, 0, 0, 0.0625;
  EXPECT_LT(max_abs(qubit_state(Hypothesis::H2, 0.0, 0.5, kG).matrix() - want), 1e-15);
}

TEST(QubitState, ConventionsAgreeToSecondOrder) {
  for (double th : {0.0, 0.05, 0.2, 0.4})
    for (double e : {0.0, 0.1, 0.3}) {
      const Matrix2d a = qubit_state(Hypothesis::H2, th, e, kG, QubitConvention::Exact).matrix();
      const Matrix2d b = qubit_state(Hypothesis::H2, th, e, kG, QubitConvention::BlochApprox).matrix();
      const double r = std::hypot(th, e);
      EXPECT_LE(max_abs(a - b), r * r * r / 10 + 1e-15) << th << " " << e;
    }
}

TEST(QubitState, RejectsInvalidMatrices) {
  EXPECT_THROW(QubitState((Matrix2d() << 0.5, 0, 0, 0.6).finished()), DomainError);
  EXPECT_THROW(QubitState((Matrix2d() << 1.2, 0, 0, -0.2).finished()), DomainError);
  EXPECT_THROW(QubitState((Matrix2d() << 0.5, 0.1, 0.2, 0.5).finished()), DomainError);
  EXPECT_THROW(qubit_state(Hypothesis::H2, 2.0, 0.1, kG), DomainError);
}

TEST(QubitState, DecompositionReproducesMatrix) {
  for (auto c : {QubitConvention::Exact, QubitConvention::BlochApprox})
    for (Hypothesis h : {Hypothesis::H1, Hypothesis::H2}) {
      Matrix2d sum = Matrix2d::Zero();
      for (const RankOneTerm& t : qubit_decomposition(h, 0.35, 0.2, kS, c)) {
        EXPECT_GE(t.weight, 0.0);
        sum += t.weight * t.v * t.v.transpose();
      }
      EXPECT_LT(max_abs(sum - qubit_state(h, 0.35, 0.2, kS, c).matrix()), 1e-15);
    }
}

TEST(BlochVector, Examples) {
  EXPECT_LT((bloch_vector(QubitState()) - Eigen::Vector3d(0, 0, 1)).norm(), 1e-15);
  for (double th : {0.0, 0.17, 0.5})
    for (double e : {0.05, 0.3}) {
      const double q = (th * th + e * e) / 4;
      Eigen::Vector3d exact(-th / (1 + q), 0, (1 - q) / (1 + q));
      EXPECT_LT((bloch_vector(qubit_state(Hypothesis::H2, th, e, kG, QubitConvention::Exact)) - exact).norm(), 1e-15);
      Eigen::Vector3d approx = (1 - e * e / 2) * Eigen::Vector3d(-std::sin(th), 0, std::cos(th));
      EXPECT_LT((bloch_vector(qubit_state(Hypothesis::H2, th, e, kG)) - approx).norm(), 1e-15);
    }
}

TEST(Eigen2Source, Examples) {
  QubitEigen g = eigendecompose_two_source(0.0, 0.2, kG);
  EXPECT_NEAR(g.mu1, 0.01, 1e-15);
  EXPECT_NEAR(g.psi1(0), 0.0, 1e-15);
  EXPECT_NEAR(g.psi1(1), 1.0, 1e-15);
  EXPECT_NEAR(eigendecompose_two_source(0.0, 0.3, kS).mu1, 0.03, 1e-15);
}

TEST(Eigen2Source, AgainstGenericEigensolver) {
  for (PsfFamily f : {kG, kS})
    for (double th : {-0.6, 0.0, 0.13, 0.5})
      for (double e : {0.01, 0.2, 0.45}) {
        const Matrix2d rho = qubit_state(Hypothesis::H2, th, e, f).matrix();
        Eigen::SelfAdjointEigenSolver<Matrix2d> es(rho);
        const QubitEigen q = eigendecompose_two_source(th, e, f);
        EXPECT_NEAR(es.eigenvalues()(0), q.mu1, 1e-12);
        EXPECT_NEAR(es.eigenvalues()(1), q.mu2, 1e-12);
        EXPECT_NEAR(std::abs(es.eigenvectors().col(0).dot(q.psi1)), 1.0, 1e-10);
        const Matrix2d rebuilt = q.mu1 * q.psi1 * q.psi1.transpose() + q.mu2 * q.psi2 * q.psi2.transpose();
        EXPECT_LT(max_abs(rebuilt - rho), 1e-10);
      }
}

TEST(Eigen2Source, SldEigenvectors) {
  auto [a, b] = theta_sld_eigenvectors(0.3, kG);
  EXPECT_NEAR(a.norm(), 1.0, 1e-15);
  EXPECT_NEAR(a.dot(b), 0.0, 1e-15);
  const QubitEigen q = eigendecompose_two_source(0.3, 0.1, kG);
  EXPECT_NEAR(std::abs(a.dot(q.psi1)), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(std::abs(b.dot(q.psi2)), std::sqrt(0.5), 1e-15);
}

TEST(Gamma, Examples) {
  EXPECT_LT(max_abs(gamma_matrix(0, 0, 0).m), 1e-16);
  EXPECT_LT(max_abs(gamma_matrix(0, 0, 0.4).m - (Matrix2d() << -0.02, 0, 0, 0.02).finished()), 1e-15);
}

TEST(Gamma, DirectConstruction) {
  const Matrix2d rho1 = qubit_state(Hypothesis::H1, 0.1, 0.25).matrix();
  const Matrix2d rho2 = qubit_state(Hypothesis::H2, 0.3, 0.25).matrix();
  const Matrix2d g = gamma_matrix(0.1, 0.3, 0.25).m;
  EXPECT_LT(max_abs(g - (rho2 - rho1) / 2), 1e-15);
  EXPECT_NEAR(g.trace(), 0.0, 1e-15);
}
