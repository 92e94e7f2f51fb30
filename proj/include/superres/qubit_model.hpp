#pragma once

#include <vector>

#include <Eigen/Dense>

#include "superres/common.hpp"
#include "superres/psf.hpp"

namespace superres {

// Exact: normalised projection of the second-order expansion onto {|0>, |1>}.
// BlochApprox: the rotated, shrunk Bloch vector (1 - 2 kappa eps^2)(-sin 2phi, 0, cos 2phi)
// with phi = sqrt(kappa) theta, on which the closed-form eigenstructure is exact.
enum class QubitConvention { Exact, BlochApprox };

class QubitState {
 public:
  QubitState() = default;
  // Throws DomainError unless m is a valid density matrix.
  explicit QubitState(const Eigen::Matrix2d& m);
  static QubitState from_bloch(const Eigen::Vector3d& r);

  const Eigen::Matrix2d& matrix() const { return m_; }

 private:
  Eigen::Matrix2d m_ = (Eigen::Matrix2d() << 1, 0, 0, 0).finished();
};

QubitState qubit_state(Hypothesis h, double theta, double eps, PsfFamily family = {},
                       QubitConvention convention = QubitConvention::BlochApprox);

struct RankOneTerm {
  double weight;
  Eigen::Vector2d v;
};

// The same state as qubit_state written as a sum of weight * v v^T. Born-rule
// probabilities built from these terms keep their relative accuracy when small.
std::vector<RankOneTerm> qubit_decomposition(Hypothesis h, double theta, double eps,
                                             PsfFamily family = {},
                                             QubitConvention convention = QubitConvention::BlochApprox);

// r_i = Tr(sigma_i rho); the y component is always zero for real states.
Eigen::Vector3d bloch_vector(const QubitState& state);

struct QubitEigen {
  double mu1 = 0.0;  // weight kappa eps^2 on psi1
  double mu2 = 1.0;
  Eigen::Vector2d psi1;
  Eigen::Vector2d psi2;
};

QubitEigen eigendecompose_two_source(double theta, double eps, PsfFamily family = {});

// Eigenvectors of the theta-SLD, (psi1 +- psi2)/sqrt(2).
std::pair<Eigen::Vector2d, Eigen::Vector2d> theta_sld_eigenvectors(double theta,
                                                                   PsfFamily family = {});

struct HelstromGamma {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
};

// (rho2 - rho1)/2 with the single source at theta0 and the pair centred on thetac.
HelstromGamma gamma_matrix(double theta0, double thetac, double eps, PsfFamily family = {});

}  // namespace superres
