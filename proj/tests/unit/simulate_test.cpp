#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "superres/simulate.hpp"

using namespace superres;

namespace {

const PsfFamily kG = PsfFamily::gaussian();

Scenario scen(double theta, double eps) { return Scenario::dimensionless(kG, theta, theta, eps); }

OutcomeDistribution dist(std::vector<double> p) {
  OutcomeDistribution d;
  for (std::size_t i = 0; i < p.size(); ++i) d.labels.push_back("y" + std::to_string(i));
  d.probs = std::move(p);
  d.no_click.assign(d.probs.size(), false);
  return d;
}

std::vector<long> proportional_counts(const OutcomeDistribution& d, long n) {
  std::vector<long> c;
  for (double p : d.probs) c.push_back(std::lround(p * n));
  return c;
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* v) { setenv("SUPERRES_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("SUPERRES_THREADS"); }
};

}  // namespace

TEST(Rng, StreamsAreKeyed) {
  CounterRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Sampling, PointMass) {
  CounterRng r(1, 0);
  EXPECT_EQ(sample_outcomes(dist({0, 1, 0}), 500, r), (std::vector<long>{0, 500, 0}));
  EXPECT_EQ(sample_outcomes(dist({0.5, 0.5}), 0, r), (std::vector<long>{0, 0}));
}

TEST(Sampling, LargeSampleFrequencies) {
  CounterRng r(2, 0);
  const long n = 1000000;
  auto c = sample_outcomes(dist({0.9, 0.1}), n, r);
  EXPECT_EQ(c[0] + c[1], n);
  EXPECT_LT(std::abs(c[1] - 0.1 * n), 5 * std::sqrt(n * 0.1 * 0.9));
}

TEST(Sampling, ChiSquare) {
  const std::vector<double> p{0.5, 0.25, 0.15, 0.1};
  CounterRng r(3, 0);
  const long n = 100000;
  auto c = sample_outcomes(dist(p), n, r);
  double chi2 = 0;
  for (std::size_t i = 0; i < p.size(); ++i) chi2 += std::pow(c[i] - n * p[i], 2) / (n * p[i]);
  EXPECT_LT(chi2, 16.27);  // 0.999 quantile, 3 degrees of freedom
}

TEST(Sampling, FrozenGolden) {
  CounterRng r(20240601, 0);
  EXPECT_EQ(sample_outcomes(dist({0.5, 0.3, 0.2}), 1000, r), (std::vector<long>{517, 292, 191}));
}

TEST(Mle, SelfConsistent) {
  for (double e : {0.1, 0.3, 0.8}) {
    Povm p = rotade_povm(0.2);
    auto c = proportional_counts(outcome_distribution(p, scen(0.2, e), Hypothesis::H2), 100000000);
    MleResult m = mle_separation(c, p, 0.2);
    EXPECT_NEAR(m.eps, e, 1e-3);
    EXPECT_FALSE(m.boundary);
  }
}

TEST(Mle, AlignedInversion) {
  // p(psi1) = Q e^{-Q}, Q = eps^2 / 4, solved by Newton
  const long n = 100000000;
  auto c = proportional_counts(outcome_distribution(rotade_povm(0.0), scen(0.0, 0.25), Hypothesis::H2), n);
  const double f = double(c[0]) / n;
  double q = f;
  for (int i = 0; i < 50; ++i) q -= (q * std::exp(-q) - f) / ((1 - q) * std::exp(-q));
  EXPECT_NEAR(mle_separation(c, rotade_povm(0.0), 0.0).eps, 2 * std::sqrt(q), 1e-3);
}

TEST(Mle, NoSecondModeClicks) {
  MleResult m = mle_separation({0, 1000, 0}, rotade_povm(0.0), 0.0);
  EXPECT_EQ(m.eps, 0.0);
  EXPECT_TRUE(m.boundary);
}

TEST(Decide, Examples) {
  OutcomeDistribution p = dist({0.4, 0.6});
  EXPECT_EQ(decide_hypothesis({3, 5}, p, p), Hypothesis::H1);
  EXPECT_EQ(decide_hypothesis({3, 5}, p, p), decide_hypothesis({3, 5}, p, p));
  Scenario s = scen(0.0, 0.2);
  Povm r = rotade_povm(0.0);
  OutcomeDistribution h1 = outcome_distribution(r, s, Hypothesis::H1);
  OutcomeDistribution h2 = outcome_distribution(r, s, Hypothesis::H2);
  const std::size_t psi1 = 0;
  ASSERT_EQ(h1.labels[psi1], "rot:1");
  std::vector<long> c(h1.size(), 0);
  c[psi1] = 1;
  c[1] = 999;
  EXPECT_EQ(decide_hypothesis(c, h1, h2), Hypothesis::H2);
  EXPECT_THROW(decide_hypothesis({1, 0, 0}, dist({0, 0.5, 0.5}), dist({0, 0.4, 0.6})), DomainError);
  EXPECT_THROW(decide_hypothesis({1, 1}, dist({0, 1}), dist({1, 0})), DomainError);
  EXPECT_THROW(decide_hypothesis({1}, dist({0.5, 0.5}), dist({0.5, 0.5})), DomainError);
}

TEST(Decide, BruteForceLikelihoods) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.05, 1);
  std::uniform_int_distribution<int> k(0, 4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(3), b(3);
    for (int i = 0; i < 3; ++i) a[i] = u(g), b[i] = u(g);
    double sa = a[0] + a[1] + a[2], sb = b[0] + b[1] + b[2];
    for (int i = 0; i < 3; ++i) a[i] /= sa, b[i] /= sb;
    std::vector<long> c{k(g), k(g), k(g)};
    double la = 1, lb = 1;
    for (int i = 0; i < 3; ++i) la *= std::pow(a[i], c[i]), lb *= std::pow(b[i], c[i]);
    if (std::abs(la - lb) < 1e-12 * std::max(la, lb)) continue;
    EXPECT_EQ(decide_hypothesis(c, dist(a), dist(b)), lb > la ? Hypothesis::H2 : Hypothesis::H1);
  }
}

TEST(MonteCarlo, SinglePhotonMatchesAnalyticError) {
  Scenario s = scen(0.3, 0.25);
  RunConfig cfg{s, rotade_povm(0.3), 1, 200000, 77, Representation::FullModel};
  TrialSummary t = empirical_error_rate(cfg);
  const double p = error_probabilities(cfg.povm, s, Representation::FullModel, BucketPolicy::Outcome).total;
  EXPECT_LT(std::abs(t.empirical_error - p), 3 * std::sqrt(p * (1 - p) / cfg.n_trials));
}

TEST(MonteCarlo, HelstromBelowChernoffBound) {
  Scenario s = Scenario::dimensionless(kG, 0.1, 0.3, 0.25);
  RunConfig cfg{s, make_povm(Measurement::Helstrom, s), 50, 20000, 5, Representation::FullModel};
  TrialSummary t = empirical_error_rate(cfg);
  const double bound = std::exp(-cfg.n_photons * t.predicted_exponent);
  EXPECT_LE(t.empirical_error, bound * (1 + 5 * t.standard_error / bound));
}

TEST(MonteCarlo, ZeroErrorsUseRuleOfThree) {
  RunConfig cfg{scen(0.0, 0.5), rotade_povm(0.0), 400, 200, 9, Representation::FullModel};
  TrialSummary t = empirical_error_rate(cfg);
  EXPECT_EQ(t.errors, 0);
  EXPECT_TRUE(t.zero_errors);
  EXPECT_DOUBLE_EQ(t.upper_bound, 3.0 / 200);
}

TEST(MonteCarlo, ReproducibleAcrossThreadCounts) {
  RunConfig cfg{scen(0.2, 0.3), rotade_povm(0.2), 300, 400, 1234, Representation::FullModel};
  TrialSummary a, b;
  {
    ThreadsEnv one("1");
    a = empirical_estimator_variance(cfg);
  }
  {
    ThreadsEnv four("4");
    b = empirical_estimator_variance(cfg);
  }
  EXPECT_EQ(a.estimates, b.estimates);
}

TEST(MonteCarlo, VarianceNearCramerRao) {
  RunConfig cfg{scen(0.0, 0.1), rotade_povm(0.0), 10000, 2000, 31, Representation::FullModel};
  TrialSummary t = empirical_estimator_variance(cfg);
  const double r = t.empirical_variance / t.crb;
  EXPECT_GE(r, 1.0);
  EXPECT_LE(r, 1.3);
}

TEST(MonteCarlo, VarianceScalesInverselyWithPhotons) {
  RunConfig lo{scen(0.0, 0.3), rotade_povm(0.0), 1000, 2000, 41, Representation::FullModel};
  RunConfig hi = lo;
  hi.n_photons = 10000;
  const double ratio = empirical_estimator_variance(lo).empirical_variance /
                       empirical_estimator_variance(hi).empirical_variance;
  EXPECT_NEAR(ratio, 10.0, 2.0);
}

TEST(MonteCarlo, BiasedRegimeFlag) {
  // eps far below eps_min: many samples show no second-mode click
  RunConfig cfg{scen(0.0, 0.02), rotade_povm(0.0), 1000, 500, 3, Representation::FullModel};
  TrialSummary t = empirical_estimator_variance(cfg);
  EXPECT_TRUE(t.biased_regime);
  EXPECT_GT(t.boundary_hits, 100);
  RunConfig ok{scen(0.0, 0.3), rotade_povm(0.0), 10000, 200, 3, Representation::FullModel};
  EXPECT_FALSE(empirical_estimator_variance(ok).biased_regime);
}
