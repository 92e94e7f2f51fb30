#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "superres/psf.hpp"
#include "superres/qubit_model.hpp"

namespace superres {

// Qubit: 2x2 operators on {|0>, |1>}. ModeSpace: operators on the derivative-pair
// basis truncated at max_index.
enum class PovmSpace { Qubit, ModeSpace };

struct Effect {
  std::string label;
  Eigen::MatrixXd op;
  // Probability is 1 minus the other outcomes, which also collects the mass a state
  // has outside the represented space.
  bool complement = false;
  // Photon left the monitored modes: no detector clicks.
  bool no_click = false;
};

struct Povm {
  PovmSpace space = PovmSpace::Qubit;
  int max_index = 1;
  std::vector<Effect> effects;
  bool has_bucket = false;
  // Helstrom construction found Gamma = 0.
  bool degenerate = false;

  int dim() const { return space == PovmSpace::Qubit ? 2 : max_index + 1; }
  std::vector<std::string> labels() const;
  const Effect& effect(const std::string& label) const;
  // Throws DomainError on non-PSD effects, incompleteness or duplicate labels.
  void validate() const;
};

inline constexpr int kDefaultMaxIndex = 20;

Povm spade_povm(int max_index = kDefaultMaxIndex);
// Fundamental mode against everything else.
Povm bspade_povm(PovmSpace space = PovmSpace::ModeSpace);
Povm spade01_povm(PovmSpace space = PovmSpace::ModeSpace);
Povm rotade_povm(double theta, PsfFamily family = {}, PovmSpace space = PovmSpace::ModeSpace);
// rot:1 projects on the positive eigenspace of Gamma (decide H2), rot:2 on the rest.
Povm helstrom_povm(const HelstromGamma& gamma);

// Place a qubit POVM on the {|0>, |1>} block of the mode space, completed by a bucket.
Povm embed_in_mode_space(const Povm& povm);
// Keep the {|0>, |1>} block; outcomes outside it go to the complement effect.
Povm restrict_to_qubit(const Povm& povm);

enum class Measurement { ROTADE, BSPADE, SPADE01, Helstrom };

const char* to_string(Measurement m);
Measurement parse_measurement(const std::string& name);

// ROTADE is aligned with the centroid misalignment thetac; Helstrom uses
// gamma_matrix(theta0, thetac, eps).
Povm make_povm(Measurement m, const Scenario& scenario, PovmSpace space = PovmSpace::ModeSpace);

enum class Representation { QubitModel, FullModel };

// How bucket outcomes enter statistics: NoClick drops them (nothing is recorded),
// Outcome keeps them as an observed result.
enum class BucketPolicy { NoClick, Outcome };

struct OutcomeDistribution {
  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<bool> no_click;

  std::size_t size() const { return probs.size(); }
  double at(const std::string& label) const;
  void validate() const;
};

OutcomeDistribution outcome_distribution(const Povm& povm, const Scenario& scenario, Hypothesis h,
                                         Representation rep = Representation::FullModel,
                                         QubitConvention convention = QubitConvention::BlochApprox);

}  // namespace superres
