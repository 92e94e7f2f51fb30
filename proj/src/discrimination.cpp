#include "superres/discrimination.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "superres/parallel.hpp"

namespace superres {

namespace {

// Golden-section search for the minimum of a convex function on [0, 1], then
// compared with the values at the endpoints.
std::pair<double, double> minimise_unit_interval(const std::function<double(double)>& f,
                                                 double f0, double f1) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double s = 0.5 * (a + b), fs = f(s);
  if (f0 <= fs) s = 0.0, fs = f0;
  if (f1 < fs) s = 1.0, fs = f1;
  return {s, fs};
}

ChernoffResult finish(double s, double value) {
  ChernoffResult r;
  r.s_star = s;
  if (!(value > std::exp(-kChernoffCap))) {
    r.infinite = true;
    r.exponent = kChernoffCap;
  } else {
    r.exponent = std::max(0.0, -std::log(std::min(value, 1.0)));
  }
  return r;
}

struct Spectrum {
  Eigen::VectorXd w;
  Eigen::MatrixXd v;
};

Spectrum spectrum(const Eigen::MatrixXd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
  Spectrum s{es.eigenvalues(), es.eigenvectors()};
  const double cut = 1e-14 * std::max(1.0, s.w.cwiseAbs().maxCoeff());
  for (int i = 0; i < s.w.size(); ++i)
    if (s.w(i) < cut) s.w(i) = 0.0;
  return s;
}

// x^s with 0^0 = 0, which projects onto the support at the endpoints.
double support_pow(double x, double s) { return x > 0.0 ? std::pow(x, s) : 0.0; }

}  // namespace

Hypothesis bayes_decision(double p1, double p2) {
  return p2 > p1 ? Hypothesis::H2 : Hypothesis::H1;
}

ErrorRates error_probabilities(const Povm& povm, const Scenario& scenario, Representation rep,
                               BucketPolicy policy, QubitConvention convention) {
  const OutcomeDistribution p1 =
      outcome_distribution(povm, scenario, Hypothesis::H1, rep, convention);
  const OutcomeDistribution p2 =
      outcome_distribution(povm, scenario, Hypothesis::H2, rep, convention);
  ErrorRates r;
  double correct1 = 0.0, correct2 = 0.0;
  for (std::size_t y = 0; y < p1.size(); ++y) {
    if (policy == BucketPolicy::NoClick && p1.no_click[y]) {
      r.no_click += 0.5 * (p1.probs[y] + p2.probs[y]);
      continue;
    }
    if (bayes_decision(p1.probs[y], p2.probs[y]) == Hypothesis::H2) {
      r.type1 += p1.probs[y];
      correct2 += p2.probs[y];
    } else {
      r.type2 += p2.probs[y];
      correct1 += p1.probs[y];
    }
  }
  r.total = 0.5 * (r.type1 + r.type2);
  r.success = 0.5 * (correct1 + correct2);
  return r;
}

double helstrom_error(const QubitState& rho1, const QubitState& rho2) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rho2.matrix() - rho1.matrix());
  return 0.5 * (1.0 - 0.5 * es.eigenvalues().cwiseAbs().sum());
}

ChernoffResult chernoff_exponent_classical(const OutcomeDistribution& p1,
                                           const OutcomeDistribution& p2) {
  if (p1.labels != p2.labels) throw DomainError("Chernoff: distributions have different outcomes");
  const std::vector<double>& a = p1.probs;
  const std::vector<double>& b = p2.probs;
  bool identical = true;
  for (std::size_t y = 0; y < a.size(); ++y) identical = identical && a[y] == b[y];
  if (identical) return {0.0, 0.5, false};

  auto f = [&](double s) {
    double t = 0.0;
    for (std::size_t y = 0; y < a.size(); ++y)
      if (a[y] > 0.0 && b[y] > 0.0) t += std::pow(a[y], s) * std::pow(b[y], 1.0 - s);
    return t;
  };
  double f0 = 0.0, f1 = 0.0;
  for (std::size_t y = 0; y < a.size(); ++y) {
    if (a[y] > 0.0) f0 += b[y];
    if (b[y] > 0.0) f1 += a[y];
  }
  const auto [s, v] = minimise_unit_interval(f, f0, f1);
  return finish(s, v);
}

ChernoffResult chernoff_exponent_quantum(const Eigen::MatrixXd& rho1, const Eigen::MatrixXd& rho2) {
  if (rho1.rows() != rho2.rows()) throw DomainError("Chernoff: states of different dimension");
  if ((rho1 - rho2).cwiseAbs().maxCoeff() == 0.0) return {0.0, 0.5, false};
  const Spectrum x = spectrum(rho1), y = spectrum(rho2);
  const Eigen::MatrixXd overlap = (x.v.transpose() * y.v).cwiseAbs2();
  auto f = [&](double s) {
    double t = 0.0;
    for (int i = 0; i < x.w.size(); ++i)
      for (int j = 0; j < y.w.size(); ++j)
        t += support_pow(x.w(i), s) * support_pow(y.w(j), 1.0 - s) * overlap(i, j);
    return t;
  };
  const auto [s, v] = minimise_unit_interval(f, f(0.0), f(1.0));
  return finish(s, v);
}

ChernoffResult chernoff_exponent_quantum(const QubitState& rho1, const QubitState& rho2) {
  return chernoff_exponent_quantum(Eigen::MatrixXd(rho1.matrix()), Eigen::MatrixXd(rho2.matrix()));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> source_span_states(const Scenario& scenario) {
  scenario.validate();
  const double z[3] = {scenario.x0, scenario.x1(), scenario.x2()};
  Eigen::Matrix3d gram;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gram(i, j) = i == j ? 1.0 : psf_overlap(scenario.psf, z[i] - z[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(gram);
  std::vector<int> keep;
  for (int i = 0; i < 3; ++i)
    if (es.eigenvalues()(i) > 1e-13) keep.push_back(i);
  // Columns of c are the source vectors in the orthonormal eigenbasis of the Gram matrix.
  Eigen::MatrixXd c(keep.size(), 3);
  for (std::size_t r = 0; r < keep.size(); ++r)
    c.row(r) = std::sqrt(es.eigenvalues()(keep[r])) * es.eigenvectors().col(keep[r]).transpose();
  Eigen::MatrixXd rho1 = c.col(0) * c.col(0).transpose();
  Eigen::MatrixXd rho2 = scenario.w * c.col(1) * c.col(1).transpose() +
                         (1.0 - scenario.w) * c.col(2) * c.col(2).transpose();
  return {rho1, rho2};
}

std::vector<ChernoffRow> chernoff_curves(const std::vector<Measurement>& measurements,
                                         const std::vector<double>& thetas,
                                         const std::vector<double>& epss, PsfFamily family,
                                         Representation rep) {
  if (thetas.empty() || epss.empty()) throw DomainError("chernoff_curves: empty grid");
  std::vector<ChernoffRow> rows(thetas.size() * epss.size());
  parallel_for(rows.size(), [&](std::size_t k) {
    ChernoffRow& row = rows[k];
    row.eps = epss[k / thetas.size()];
    row.theta = thetas[k % thetas.size()];
    const Scenario s = Scenario::dimensionless(family, row.theta, row.theta, row.eps);
    for (Measurement m : measurements) {
      const Povm povm = make_povm(m, s, PovmSpace::ModeSpace);
      row.xi.push_back(
          chernoff_exponent_classical(outcome_distribution(povm, s, Hypothesis::H1, rep),
                                      outcome_distribution(povm, s, Hypothesis::H2, rep))
              .exponent);
    }
    if (rep == Representation::FullModel) {
      const auto [r1, r2] = source_span_states(s);
      row.xi_qm = chernoff_exponent_quantum(r1, r2).exponent;
    } else {
      row.xi_qm = chernoff_exponent_quantum(qubit_state(Hypothesis::H1, row.theta, 0.0, family),
                                            qubit_state(Hypothesis::H2, row.theta, row.eps, family))
                      .exponent;
    }
  });
  return rows;
}

IntrinsicError intrinsic_error(const Scenario& scenario, const Povm& paired_povm,
                               Representation rep) {
  if (paired_povm.dim() != 2)
    throw DomainError("intrinsic_error: POVM must act on the two monitored modes");
  const ErrorRates r = error_probabilities(paired_povm, scenario, rep, BucketPolicy::NoClick);
  IntrinsicError out;
  out.p_err = r.total;
  out.p_suc = r.success;
  out.p_intrinsic = 1.0 - (r.total + r.success);
  return out;
}

}  // namespace superres
