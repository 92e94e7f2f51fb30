#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "superres/measurements.hpp"

namespace superres {

// Parameter order (theta, eps).
struct FisherMatrix {
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  // Outcomes left out because their probability was below 1e-12.
  std::vector<std::string> excluded;
  // Some excluded outcome had a non-negligible derivative.
  bool divergent = false;

  double theta_theta() const { return m(0, 0); }
  double eps_eps() const { return m(1, 1); }
};

// SLDs of the two-source qubit state, written in the {psi1, psi2} eigenbasis.
struct SldPair {
  Eigen::Matrix2d L_theta;
  Eigen::Matrix2d L_eps;
};

SldPair sld_operators(double theta, double eps, PsfFamily family = {});
// Same operators in the {|0>, |1>} basis.
SldPair sld_operators_standard_basis(double theta, double eps, PsfFamily family = {});

FisherMatrix qfi_matrix(double theta, double eps, PsfFamily family = {});

// Tr(rho [L_theta, L_eps]).
double weak_commutation_check(double theta, double eps, PsfFamily family = {});

// Quantum Fisher matrix of the two-source state in the truncated Gaussian mode space.
FisherMatrix qfi_full_model(const Scenario& scenario, int max_index = kDefaultMaxIndex);

// Classical Fisher information of the H2 outcome statistics with respect to
// (thetac, eps) for a fixed POVM.
FisherMatrix cfi_matrix(const Povm& povm, const Scenario& scenario,
                        Representation rep = Representation::FullModel,
                        BucketPolicy policy = BucketPolicy::NoClick,
                        QubitConvention convention = QubitConvention::BlochApprox);

struct SmallSepCoefficient {
  double value = 0.0;
  bool converged = false;
  double spread = 0.0;  // relative change between the last two extrapolants
};

// C(theta) = lim F_eps,eps / eps^2 for the measurement aligned with theta.
SmallSepCoefficient small_sep_coefficient(Measurement m, double theta, PsfFamily family = {},
                                          Representation rep = Representation::FullModel);

// Exact uses the full CFI; LeadingOrder uses F = C(theta) eps^2.
enum class FisherModel { Exact, LeadingOrder };

// Solves eps * sqrt(n F_eps,eps(eps)) = 1 on (0, 1].
double min_resolvable_separation(Measurement m, double theta, double n, PsfFamily family = {},
                                 FisherModel model = FisherModel::Exact,
                                 Representation rep = Representation::FullModel);

}  // namespace superres
