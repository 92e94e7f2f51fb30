#include "superres/estimation.hpp"

#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "superres/quadrature.hpp"

namespace superres {

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kTinyProbability = 1e-12;

Eigen::Matrix2d sigma_x() { return (Eigen::Matrix2d() << 0, 1, 1, 0).finished(); }

void require_positive_eps(double eps) {
  if (!(eps > 0.0)) throw DomainError("SLD for eps is singular at eps = 0");
}

// Scenario with the centroid and half-separation moved by dimensionless steps.
Scenario shifted(const Scenario& s, double dtheta, double deps) {
  Scenario t = s;
  t.xc += dtheta * s.psf.sigma;
  t.d += deps * s.psf.sigma;
  return t;
}

// d/dz <mode_n | Psi(z)>.
double mode_overlap_derivative(const ModeBasis& basis, int n, const PsfModel& model, double z) {
  const double half = (20.0 + 2.0 * std::sqrt(double(n))) * model.sigma;
  auto f = [&](double x) {
    return -mode_amplitude(basis, n, model, x) * psf_amplitude_derivative(model, x, z);
  };
  return integrate(f, std::min(basis.xR, z) - half, std::max(basis.xR, z) + half).value;
}

}  // namespace

SldPair sld_operators(double theta, double eps, PsfFamily family) {
  require_positive_eps(eps);
  const QubitEigen e = eigendecompose_two_source(theta, eps, family);
  const double kappa = family.kappa();
  SldPair s;
  s.L_theta = 2.0 * std::sqrt(kappa) * (e.mu2 - e.mu1) * sigma_x();
  s.L_eps = Eigen::Matrix2d::Zero();
  s.L_eps(0, 0) = 2.0 / eps;
  s.L_eps(1, 1) = -2.0 * kappa * eps / e.mu2;
  return s;
}

SldPair sld_operators_standard_basis(double theta, double eps, PsfFamily family) {
  const SldPair s = sld_operators(theta, eps, family);
  const QubitEigen e = eigendecompose_two_source(theta, eps, family);
  Eigen::Matrix2d u;
  u.col(0) = e.psi1;
  u.col(1) = e.psi2;
  return {u * s.L_theta * u.transpose(), u * s.L_eps * u.transpose()};
}

FisherMatrix qfi_matrix(double theta, double eps, PsfFamily family) {
  const SldPair s = sld_operators(theta, eps, family);
  const QubitEigen e = eigendecompose_two_source(theta, eps, family);
  const Eigen::Matrix2d rho = Eigen::Vector2d(e.mu1, e.mu2).asDiagonal();
  const Eigen::Matrix2d* L[2] = {&s.L_theta, &s.L_eps};
  FisherMatrix f;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      f.m(i, j) = 0.5 * (rho * (*L[i] * *L[j] + *L[j] * *L[i])).trace();
  return f;
}

double weak_commutation_check(double theta, double eps, PsfFamily family) {
  const SldPair s = sld_operators(theta, eps, family);
  const QubitEigen e = eigendecompose_two_source(theta, eps, family);
  const Eigen::Matrix2d rho = Eigen::Vector2d(e.mu1, e.mu2).asDiagonal();
  return (rho * (s.L_theta * s.L_eps - s.L_eps * s.L_theta)).trace();
}

FisherMatrix qfi_full_model(const Scenario& scenario, int max_index) {
  scenario.validate();
  if (scenario.psf.family.kind != PsfKind::Gaussian)
    throw DomainError("full-model QFI needs a complete mode basis (Gaussian PSF only)");
  const ModeBasis basis{ModeKind::DerivativePair, scenario.xR, max_index};
  basis.validate(scenario.psf);
  const int dim = max_index + 1;
  const double sg = scenario.psf.sigma;

  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd drho[2] = {Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  const std::vector<Source> src = sources(scenario, Hypothesis::H2);
  // dz/dtheta and dz/deps for the two sources.
  const double dz[2][2] = {{sg, -2.0 * (1.0 - scenario.w) * sg}, {sg, 2.0 * scenario.w * sg}};
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd c(dim), dc(dim);
    for (int n = 0; n < dim; ++n) {
      c(n) = mode_overlap(basis, n, scenario.psf, src[k].z);
      dc(n) = mode_overlap_derivative(basis, n, scenario.psf, src[k].z);
    }
    rho += src[k].weight * c * c.transpose();
    const Eigen::MatrixXd sym = dc * c.transpose() + c * dc.transpose();
    for (int i = 0; i < 2; ++i) drho[i] += src[k].weight * dz[k][i] * sym;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
  const Eigen::VectorXd& mu = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::MatrixXd d[2] = {v.transpose() * drho[0] * v, v.transpose() * drho[1] * v};
  FisherMatrix f;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
          const double s = mu(a) + mu(b);
          if (s > 1e-12) acc += 2.0 * d[i](a, b) * d[j](b, a) / s;
        }
      f.m(i, j) = acc;
    }
  return f;
}

FisherMatrix cfi_matrix(const Povm& povm, const Scenario& scenario, Representation rep,
                        BucketPolicy policy, QubitConvention convention) {
  auto dist = [&](double dt, double de) {
    return outcome_distribution(povm, shifted(scenario, dt, de), Hypothesis::H2, rep, convention);
  };
  const OutcomeDistribution p = dist(0.0, 0.0);
  const std::size_t ny = p.size();
  // Richardson-extrapolated central differences, one column per parameter.
  Eigen::MatrixXd grad(ny, 2);
  for (int i = 0; i < 2; ++i) {
    auto central = [&](double h) {
      const OutcomeDistribution up = dist(i == 0 ? h : 0.0, i == 1 ? h : 0.0);
      const OutcomeDistribution dn = dist(i == 0 ? -h : 0.0, i == 1 ? -h : 0.0);
      Eigen::VectorXd g(ny);
      for (std::size_t y = 0; y < ny; ++y) g(y) = (up.probs[y] - dn.probs[y]) / (2.0 * h);
      return g;
    };
    grad.col(i) = (4.0 * central(kFdStep / 2) - central(kFdStep)) / 3.0;
  }

  FisherMatrix f;
  for (std::size_t y = 0; y < ny; ++y) {
    if (policy == BucketPolicy::NoClick && p.no_click[y]) continue;
    if (p.probs[y] < kTinyProbability) {
      f.excluded.push_back(p.labels[y]);
      if (grad.row(y).cwiseAbs().maxCoeff() > 1e-9) f.divergent = true;
      continue;
    }
    f.m += grad.row(y).transpose() * grad.row(y) / p.probs[y];
  }
  return f;
}

SmallSepCoefficient small_sep_coefficient(Measurement m, double theta, PsfFamily family,
                                          Representation rep) {
  if (!(theta > 0.0 && theta <= 0.5))
    throw DomainError("small_sep_coefficient: theta must lie in (0, 0.5]");
  const Scenario base = Scenario::dimensionless(family, theta, theta, 0.0);
  const Povm povm = make_povm(m, base, PovmSpace::ModeSpace);
  auto dist = [&](double eps) {
    return outcome_distribution(povm, Scenario::dimensionless(family, theta, theta, eps),
                                Hypothesis::H2, rep);
  };
  const OutcomeDistribution p0 = dist(0.0);
  const std::size_t ny = p0.size();
  const double hs[3] = {1e-2, 5e-3, 2.5e-3};
  // Second derivatives from the even expansion p(h) = p0 + p'' h^2 / 2 + ...
  Eigen::MatrixXd dd(ny, 3);
  for (int k = 0; k < 3; ++k) {
    const OutcomeDistribution ph = dist(hs[k]);
    for (std::size_t y = 0; y < ny; ++y) dd(y, k) = 2.0 * (ph.probs[y] - p0.probs[y]) / (hs[k] * hs[k]);
  }
  const Eigen::VectorXd r1a = (4.0 * dd.col(1) - dd.col(0)) / 3.0;
  const Eigen::VectorXd r1b = (4.0 * dd.col(2) - dd.col(1)) / 3.0;
  const Eigen::VectorXd r2 = (16.0 * r1b - r1a) / 15.0;

  auto coefficient = [&](const Eigen::VectorXd& pp) {
    double c = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      if (p0.no_click[y] || p0.probs[y] <= 0.0) continue;
      c += pp(y) * pp(y) / p0.probs[y];
    }
    return c;
  };
  SmallSepCoefficient out;
  out.value = coefficient(r2);
  out.spread = std::abs(coefficient(r1b) - out.value) / out.value;
  out.converged = std::isfinite(out.value) && out.value > 0.0 && out.spread < 1e-3;
  return out;
}

double min_resolvable_separation(Measurement m, double theta, double n, PsfFamily family,
                                 FisherModel model, Representation rep) {
  if (!(n >= 1.0)) throw DomainError("min_resolvable_separation: need n >= 1");
  if (!(theta > 0.0 && theta <= 0.5))
    throw DomainError("min_resolvable_separation: theta must lie in (0, 0.5]");
  std::function<double(double)> snr;
  if (model == FisherModel::LeadingOrder) {
    const SmallSepCoefficient c = small_sep_coefficient(m, theta, family, rep);
    if (!c.converged) throw NumericalError("small-separation coefficient did not converge", c.spread);
    snr = [=](double eps) { return eps * eps * std::sqrt(n * c.value) - 1.0; };
  } else {
    const Povm povm = make_povm(m, Scenario::dimensionless(family, theta, theta, 0.0));
    snr = [=](double eps) {
      const FisherMatrix f =
          cfi_matrix(povm, Scenario::dimensionless(family, theta, theta, eps), rep);
      return eps * std::sqrt(n * f.eps_eps()) - 1.0;
    };
  }
  const double lo = 1e-6, hi = 1.0;
  if (snr(lo) > 0.0 || snr(hi) < 0.0)
    throw DomainError("min_resolvable_separation: no root in (0, 1] for this theta and n");
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-10; };
  const auto [a, b] = boost::math::tools::bisect(snr, lo, hi, tol);
  return 0.5 * (a + b);
}

}  // namespace superres
