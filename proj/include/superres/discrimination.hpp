#pragma once

#include <vector>

#include <Eigen/Dense>

#include "superres/measurements.hpp"

namespace superres {

// Equal priors. Under BucketPolicy::NoClick a no-click outcome is neither an error
// nor a success; its mass is reported in no_click.
struct ErrorRates {
  double type1 = 0.0;  // decide H2 given H1
  double type2 = 0.0;  // decide H1 given H2
  double total = 0.0;
  double success = 0.0;
  double no_click = 0.0;
};

// Bayes decision for one outcome; ties go to H1.
Hypothesis bayes_decision(double p1, double p2);

ErrorRates error_probabilities(const Povm& povm, const Scenario& scenario,
                               Representation rep = Representation::FullModel,
                               BucketPolicy policy = BucketPolicy::NoClick,
                               QubitConvention convention = QubitConvention::BlochApprox);

// 1/2 (1 - 1/2 ||rho2 - rho1||_1) for qubit states.
double helstrom_error(const QubitState& rho1, const QubitState& rho2);

inline constexpr double kChernoffCap = 700.0;

struct ChernoffResult {
  double exponent = 0.0;
  double s_star = 0.5;
  // Perfectly distinguishable: exponent is capped at kChernoffCap.
  bool infinite = false;
};

// Uses every outcome in the distributions, including the bucket.
ChernoffResult chernoff_exponent_classical(const OutcomeDistribution& p1,
                                           const OutcomeDistribution& p2);

ChernoffResult chernoff_exponent_quantum(const Eigen::MatrixXd& rho1, const Eigen::MatrixXd& rho2);
ChernoffResult chernoff_exponent_quantum(const QubitState& rho1, const QubitState& rho2);

// The H1 and H2 states written in an orthonormal basis of span{Psi(x0), Psi(x1), Psi(x2)}.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> source_span_states(const Scenario& scenario);

struct ChernoffRow {
  double theta = 0.0;
  double eps = 0.0;
  std::vector<double> xi;  // one per requested measurement
  double xi_qm = 0.0;
};

// theta is both the single-source and the centroid misalignment.
std::vector<ChernoffRow> chernoff_curves(const std::vector<Measurement>& measurements,
                                         const std::vector<double>& thetas,
                                         const std::vector<double>& epss, PsfFamily family = {},
                                         Representation rep = Representation::FullModel);

struct IntrinsicError {
  double p_err = 0.0;
  double p_suc = 0.0;
  double p_intrinsic = 0.0;
};

// Mass not accounted for by the monitored pair of modes.
IntrinsicError intrinsic_error(const Scenario& scenario, const Povm& paired_povm,
                               Representation rep = Representation::FullModel);

}  // namespace superres
