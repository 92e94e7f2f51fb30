#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "superres/discrimination.hpp"

using namespace superres;
using Eigen::Matrix2d;

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

Matrix2d mpow(const Matrix2d& m, double s) {
  Eigen::SelfAdjointEigenSolver<Matrix2d> es(m);
  Eigen::Vector2d ev;
  for (int i = 0; i < 2; ++i) ev(i) = es.eigenvalues()(i) > 1e-300 ? std::pow(es.eigenvalues()(i), s) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// -log min over a grid of s in [0, 1]; f must use support projectors at the ends
template <class F>
double grid_exponent(F f, int n = 100000) {
  double best = 1e300;
  for (int i = 0; i <= n; ++i) best = std::min(best, f(double(i) / n));
  return -std::log(best);
}

}  // namespace

TEST(Bayes, TiesGoToH1) {
  EXPECT_EQ(bayes_decision(0.3, 0.3), Hypothesis::H1);
  EXPECT_EQ(bayes_decision(0.2, 0.3), Hypothesis::H2);
  EXPECT_EQ(bayes_decision(0.0, 0.0), Hypothesis::H1);
}

TEST(ErrorProbabilities, AlignedRotade) {
  for (double e : {0.1, 0.25, 0.5}) {
    ErrorRates r = error_probabilities(rotade_povm(0.0), scen(0.0, e));
    EXPECT_NEAR(r.type1, 0.0, 1e-15);
    EXPECT_NEAR(r.type2, std::exp(-e * e / 4), 1e-10);
  }
}

TEST(ErrorProbabilities, RotadeSixthPower) {
  std::vector<double> th{0.01, 0.02, 0.03, 0.04, 0.05}, t1;
  for (double t : th) t1.push_back(error_probabilities(rotade_povm(t), scen(t, 0.25)).type1);
  double mx = 0, my = 0, sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < th.size(); ++i) mx += std::log(th[i]) / 5, my += std::log(t1[i]) / 5;
  for (std::size_t i = 0; i < th.size(); ++i) {
    sxy += (std::log(th[i]) - mx) * (std::log(t1[i]) - my);
    sxx += (std::log(th[i]) - mx) * (std::log(th[i]) - mx);
  }
  EXPECT_NEAR(sxy / sxx, 6.0, 0.05);
  EXPECT_NEAR(t1[0] / (std::pow(0.01, 6) / 576), 1.0, 0.05);
}

TEST(ErrorProbabilities, Spade01AgainstDirectBayes) {
  for (double th : {0.01, 0.05, 0.2}) {
    Scenario s = scen(th, 0.25);
    Povm p = spade01_povm();
    OutcomeDistribution a = outcome_distribution(p, s, Hypothesis::H1);
    OutcomeDistribution b = outcome_distribution(p, s, Hypothesis::H2);
    double t1 = 0, t2 = 0;
    for (const char* l : {"mode:0", "mode:1"}) {
      if (b.at(l) > a.at(l)) t1 += a.at(l); else t2 += b.at(l);
    }
    ErrorRates r = error_probabilities(p, s);
    EXPECT_NEAR(r.type1, t1, 1e-15);
    EXPECT_NEAR(r.type2, t2, 1e-15);
    EXPECT_NEAR(r.no_click, (a.at("bucket") + b.at("bucket")) / 2, 1e-15);
  }
  EXPECT_NEAR(error_probabilities(spade01_povm(), scen(0.01, 0.25)).type1 / (0.01 * 0.01 / 4), 1.0, 1e-3);
}

TEST(Helstrom, TraceDistance) {
  for (auto [t0, tc, e] : {std::tuple{0.0, 0.0, 0.3}, {0.1, 0.3, 0.25}, {-0.2, 0.4, 0.1}}) {
    QubitState r1 = qubit_state(Hypothesis::H1, t0, e), r2 = qubit_state(Hypothesis::H2, tc, e);
    Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Matrix2d>(r2.matrix() - r1.matrix()).eigenvalues();
    const double want = 0.5 * (1 - 0.5 * ev.cwiseAbs().sum());
    EXPECT_NEAR(helstrom_error(r1, r2), want, 1e-15);
    Scenario s = Scenario::dimensionless(kG, t0, tc, e);
    ErrorRates h = error_probabilities(helstrom_povm(gamma_matrix(t0, tc, e)), s, Representation::QubitModel,
                                       BucketPolicy::Outcome);
    EXPECT_NEAR(h.total, want, 1e-12);
  }
}

TEST(Helstrom, MinimalOverProjectiveMeasurements) {
  QubitState r1 = qubit_state(Hypothesis::H1, 0.1, 0.3), r2 = qubit_state(Hypothesis::H2, 0.35, 0.3);
  const double ph = helstrom_error(r1, r2);
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0, 3.14159);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector2d v(std::cos(u(g)), 0);
    v(1) = std::sqrt(1 - v(0) * v(0));
    const double a1 = v.dot(r1.matrix() * v), a2 = v.dot(r2.matrix() * v);
    const double err = 0.5 * (std::min(a1, a2) + std::min(1 - a1, 1 - a2));
    EXPECT_GE(err, ph - 1e-15);
  }
}

TEST(Chernoff, TrivialCases) {
  EXPECT_EQ(chernoff_exponent_classical(dist({0.3, 0.7}), dist({0.3, 0.7})).exponent, 0.0);
  ChernoffResult inf = chernoff_exponent_classical(dist({1, 0}), dist({0, 1}));
  EXPECT_TRUE(inf.infinite);
  EXPECT_EQ(inf.exponent, kChernoffCap);
  QubitState r = qubit_state(Hypothesis::H2, 0.2, 0.3);
  EXPECT_NEAR(chernoff_exponent_quantum(r, r).exponent, 0.0, 1e-14);
  EXPECT_THROW(chernoff_exponent_classical(dist({1.0}), dist({0.5, 0.5})), DomainError);
}

TEST(Chernoff, ClassicalAgainstGrid) {
  OutcomeDistribution a = dist({0.5, 0.3, 0.2}), b = dist({0.1, 0.2, 0.7});
  auto f = [&](double s) {
    double t = 0;
    for (int y = 0; y < 3; ++y) t += std::pow(a.probs[y], s) * std::pow(b.probs[y], 1 - s);
    return t;
  };
  ChernoffResult c = chernoff_exponent_classical(a, b);
  EXPECT_NEAR(c.exponent, grid_exponent(f), 1e-9);
  EXPECT_GT(c.s_star, 0.0);
  EXPECT_LT(c.s_star, 1.0);
}

TEST(Chernoff, BspadeEndpoint) {
  Scenario s = scen(0.0, 0.5);
  OutcomeDistribution a = outcome_distribution(bspade_povm(), s, Hypothesis::H1);
  OutcomeDistribution b = outcome_distribution(bspade_povm(), s, Hypothesis::H2);
  auto f = [&](double t) {
    double v = 0;
    for (std::size_t y = 0; y < a.size(); ++y)
      if (a.probs[y] > 0 && b.probs[y] > 0) v += std::pow(a.probs[y], t) * std::pow(b.probs[y], 1 - t);
    return v;
  };
  const double xi = chernoff_exponent_classical(a, b).exponent;
  EXPECT_NEAR(xi, grid_exponent(f), 1e-6);
  EXPECT_NEAR(xi, 0.0625, 1e-10);
}

TEST(Chernoff, QubitAlignedClosedForm) {
  for (double e : {0.1, 0.3, 0.5}) {
    ChernoffResult c = chernoff_exponent_quantum(qubit_state(Hypothesis::H1, 0, e), qubit_state(Hypothesis::H2, 0, e));
    EXPECT_NEAR(c.exponent, -std::log(1 - e * e / 4), 1e-10);
    EXPECT_NEAR(c.s_star, 0.0, 1e-6);
  }
}

TEST(Chernoff, QubitAgainstGrid) {
  QubitState r1 = qubit_state(Hypothesis::H1, 0.1, 0.3), r2 = qubit_state(Hypothesis::H2, 0.35, 0.3);
  auto f = [&](double s) { return (mpow(r1.matrix(), s) * mpow(r2.matrix(), 1 - s)).trace(); };
  EXPECT_NEAR(chernoff_exponent_quantum(r1, r2).exponent, grid_exponent(f, 20000), 1e-8);
}

TEST(Chernoff, FullModelAligned) {
  for (double e : {0.1, 0.25, 0.5}) {
    auto [a, b] = source_span_states(scen(0.0, e));
    EXPECT_NEAR(chernoff_exponent_quantum(a, b).exponent, e * e / 4, 1e-8);
  }
}

TEST(Chernoff, CurvesStructure) {
  std::vector<Measurement> ms{Measurement::ROTADE, Measurement::SPADE01, Measurement::BSPADE};
  auto rows = chernoff_curves(ms, {0.0, 0.01, 0.1, 0.3, 0.5}, {0.25});
  ASSERT_EQ(rows.size(), 5u);
  for (double x : rows[0].xi) EXPECT_NEAR(x, rows[0].xi_qm, 1e-6);
  // a misalignment of 0.01 already drops every exponent well below its theta = 0 value
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(rows[1].xi[i], 0.9 * rows[0].xi[i]) << to_string(ms[i]);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].xi[0], rows[i].xi_qm + 1e-12);
    EXPECT_GT(rows[i].xi[0], rows[i].xi[1]);
    EXPECT_GT(rows[i].xi[0], rows[i].xi[2]);
  }
}

TEST(Intrinsic, AlignedFormulas) {
  for (double e : {0.1, 0.25, 0.5}) {
    const double q = e * e / 4;
    IntrinsicError r = intrinsic_error(scen(0.0, e), spade01_povm());
    EXPECT_NEAR(r.p_suc, (1 + q * std::exp(-q)) / 2, 1e-12);
    EXPECT_NEAR(r.p_intrinsic, (1 - std::exp(-q) * (1 + q)) / 2, 1e-12);
  }
}

TEST(Intrinsic, SmallInWorkingRegion) {
  for (double th : {-0.45, -0.2, 0.0, 0.25, 0.45})
    for (double e : {0.1, 0.25, 0.45}) EXPECT_LT(intrinsic_error(scen(th, e), spade01_povm()).p_intrinsic, 0.01);
  EXPECT_THROW(intrinsic_error(scen(0, 0.2), spade_povm(4)), DomainError);
}
