#include "superres/qubit_model.hpp"

#include <cmath>

namespace superres {

namespace {

void check_domain(double theta, double eps, PsfFamily family, QubitConvention c) {
  if (!std::isfinite(theta) || !std::isfinite(eps) || eps < 0.0)
    throw DomainError("qubit_state: need finite theta and eps >= 0");
  if (c == QubitConvention::BlochApprox) {
    if (std::abs(theta) > 1.0 || eps > 1.0)
      throw DomainError("qubit model is only used for |theta| <= 1 and eps <= 1");
    if (family.kappa() * eps * eps > 0.5)
      throw DomainError("qubit model: separation too large for this PSF normalisation");
  }
}

}  // namespace

QubitState::QubitState(const Eigen::Matrix2d& m) : m_(m) {
  if (!m.allFinite()) throw DomainError("density matrix has non-finite entries");
  if (std::abs(m(0, 1) - m(1, 0)) > 1e-12) throw DomainError("density matrix is not Hermitian");
  if (std::abs(m.trace() - 1.0) > 1e-12) throw DomainError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  if (es.eigenvalues().minCoeff() < -1e-12) throw DomainError("density matrix is not positive");
}

QubitState QubitState::from_bloch(const Eigen::Vector3d& r) {
  if (r(1) != 0.0) throw DomainError("only real qubit states are represented");
  Eigen::Matrix2d m;
  m << 1.0 + r(2), r(0), r(0), 1.0 - r(2);
  return QubitState(0.5 * m);
}

QubitState qubit_state(Hypothesis h, double theta, double eps, PsfFamily family,
                       QubitConvention convention) {
  if (h == Hypothesis::H1) eps = 0.0;
  check_domain(theta, eps, family, convention);
  const double kappa = family.kappa();
  if (convention == QubitConvention::Exact) {
    const double a = std::sqrt(kappa) * theta;
    const double b2 = kappa * (theta * theta + eps * eps);
    Eigen::Matrix2d m;
    m << 1.0, -a, -a, b2;
    return QubitState(m / (1.0 + b2));
  }
  const double shrink = 1.0 - 2.0 * kappa * eps * eps;
  const double ang = 2.0 * std::sqrt(kappa) * theta;
  return QubitState::from_bloch({-shrink * std::sin(ang), 0.0, shrink * std::cos(ang)});
}

std::vector<RankOneTerm> qubit_decomposition(Hypothesis h, double theta, double eps,
                                             PsfFamily family, QubitConvention convention) {
  if (h == Hypothesis::H1) eps = 0.0;
  check_domain(theta, eps, family, convention);
  const double kappa = family.kappa();
  if (convention == QubitConvention::Exact) {
    const double a = std::sqrt(kappa) * theta;
    const double norm = 1.0 + kappa * (theta * theta + eps * eps);
    return {{1.0 / norm, Eigen::Vector2d(1.0, -a)},
            {kappa * eps * eps / norm, Eigen::Vector2d(0.0, 1.0)}};
  }
  const QubitEigen e = eigendecompose_two_source(theta, eps, family);
  return {{e.mu1, e.psi1}, {e.mu2, e.psi2}};
}

Eigen::Vector3d bloch_vector(const QubitState& state) {
  const Eigen::Matrix2d& m = state.matrix();
  return {2.0 * m(0, 1), 0.0, m(0, 0) - m(1, 1)};
}

QubitEigen eigendecompose_two_source(double theta, double eps, PsfFamily family) {
  check_domain(theta, eps, family, QubitConvention::BlochApprox);
  const double kappa = family.kappa();
  const double phi = std::sqrt(kappa) * theta;
  QubitEigen e;
  e.mu1 = kappa * eps * eps;
  e.mu2 = 1.0 - e.mu1;
  e.psi1 << std::sin(phi), std::cos(phi);
  e.psi2 << -std::cos(phi), std::sin(phi);
  return e;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> theta_sld_eigenvectors(double theta,
                                                                   PsfFamily family) {
  QubitEigen e = eigendecompose_two_source(theta, 0.0, family);
  const double r = std::sqrt(0.5);
  return {r * (e.psi1 + e.psi2), r * (e.psi1 - e.psi2)};
}

HelstromGamma gamma_matrix(double theta0, double thetac, double eps, PsfFamily family) {
  const Eigen::Vector3d r1 = bloch_vector(qubit_state(Hypothesis::H1, theta0, 0.0, family));
  const Eigen::Vector3d r2 = bloch_vector(qubit_state(Hypothesis::H2, thetac, eps, family));
  const Eigen::Vector3d dr = 0.25 * (r2 - r1);
  HelstromGamma g;
  g.m << dr(2), dr(0), dr(0), -dr(2);
  return g;
}

}  // namespace superres
