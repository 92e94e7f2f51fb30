#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "superres/discrimination.hpp"
#include "superres/estimation.hpp"

namespace superres {

// Independent stream for (seed, index): the same pair always yields the same draws,
// so trials can run in any order or in parallel.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index);
  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Multinomial counts via successive conditional binomials.
std::vector<long> sample_outcomes(const OutcomeDistribution& dist, long n, CounterRng& rng);

// log p(y | eps) on the grid eps_k = 2k/(grid_size-1) for a fixed POVM and known theta.
class LikelihoodTable {
 public:
  LikelihoodTable(const Povm& povm, double theta, PsfFamily family = {},
                  Representation rep = Representation::FullModel, int grid_size = 2001,
                  double eps_max = 2.0);
  double log_likelihood(const std::vector<long>& counts, std::size_t k) const;
  std::size_t size() const { return eps_.size(); }
  double eps(std::size_t k) const { return eps_[k]; }

 private:
  std::vector<double> eps_;
  std::vector<std::vector<double>> logp_;  // [grid point][outcome]
};

struct MleResult {
  double eps = 0.0;
  bool boundary = false;  // maximum at eps = 0 or at the top of the grid
};

MleResult mle_separation(const std::vector<long>& counts, const LikelihoodTable& table);
MleResult mle_separation(const std::vector<long>& counts, const Povm& povm, double theta_known,
                         PsfFamily family = {});

// Likelihood-ratio decision with equal priors; ties go to H1.
Hypothesis decide_hypothesis(const std::vector<long>& counts, const OutcomeDistribution& p1,
                             const OutcomeDistribution& p2);

struct RunConfig {
  Scenario scenario;
  Povm povm;
  long n_photons = 1;
  long n_trials = 1;
  std::uint64_t seed = 0;
  Representation rep = Representation::FullModel;
};

struct TrialSummary {
  std::vector<double> estimates;
  std::vector<Hypothesis> decisions;
  std::vector<Hypothesis> truths;

  long errors = 0;
  double empirical_error = 0.0;
  double standard_error = 0.0;
  // Set when no error was observed: rule-of-three 95% upper bound on the rate.
  bool zero_errors = false;
  double upper_bound = 0.0;
  double predicted_exponent = 0.0;
  double empirical_exponent = 0.0;

  double mean = 0.0;
  double empirical_variance = 0.0;
  double crb = 0.0;
  long boundary_hits = 0;
  bool biased_regime = false;
};

// Each trial draws H1 or H2 with probability 1/2 and decides from n photons.
TrialSummary empirical_error_rate(const RunConfig& config);

// Sample variance of the separation MLE under H2, against 1/(n F_eps,eps).
TrialSummary empirical_estimator_variance(const RunConfig& config);

}  // namespace superres
