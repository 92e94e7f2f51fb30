#include "superres/psf.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "superres/quadrature.hpp"

namespace superres {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double t) {
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

double sinc_prime(double t) {
  if (std::abs(t) < 1e-4) return -t / 3.0 + t * t * t / 30.0;
  return (t * std::cos(t) - std::sin(t)) / (t * t);
}

// Normalised Hermite functions h_0..h_n at u; h_n(u) = H_n(u) e^{-u^2/2} / sqrt(2^n n! sqrt(pi)).
double hermite_function(int n, double u) {
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25) * std::exp(-0.5 * u * u);
  for (int k = 0; k < n; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * u * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void check_index(int n) {
  if (n < 0 || n > kMaxHermiteOrder)
    throw DomainError("mode index " + std::to_string(n) + " outside supported range 0.." +
                      std::to_string(kMaxHermiteOrder));
}

bool band_limited(const ModeBasis& basis, const PsfModel& model) {
  return model.family.kind == PsfKind::Sinc && basis.kind == ModeKind::DerivativePair;
}

}  // namespace

const char* to_string(Hypothesis h) { return h == Hypothesis::H1 ? "H1" : "H2"; }

double PsfFamily::kappa() const {
  if (kind == PsfKind::Gaussian) return 0.25;
  return sinc == SincConvention::Unnormalized ? 1.0 / 3.0 : kPi * kPi / 3.0;
}

void PsfModel::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("PSF width sigma must be > 0");
}

double PsfModel::aperture_scale() const {
  return family.sinc == SincConvention::Unnormalized ? kPi * sigma : sigma;
}

double PsfModel::norm_factor() const { return family.kappa() / (sigma * sigma); }

void Scenario::validate() const {
  psf.validate();
  if (!(d >= 0.0)) throw DomainError("separation d must be >= 0");
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("weight w must lie in [0, 1]");
  if (!std::isfinite(theta0()) || !std::isfinite(thetac()) || !std::isfinite(eps()))
    throw DomainError("scenario parameters must be finite");
}

Scenario Scenario::dimensionless(PsfFamily family, double theta0, double thetac, double eps,
                                 double sigma, double xR) {
  Scenario s;
  s.psf = {family, sigma};
  s.xR = xR;
  s.x0 = xR + theta0 * sigma;
  s.xc = xR + thetac * sigma;
  s.d = eps * sigma;
  return s;
}

std::vector<Source> sources(const Scenario& s, Hypothesis h) {
  if (h == Hypothesis::H1) return {{s.x0, 1.0}};
  return {{s.x1(), s.w}, {s.x2(), 1.0 - s.w}};
}

void ModeBasis::validate(const PsfModel& model) const {
  if (max_index < 1) throw DomainError("mode basis needs max_index >= 1");
  check_index(max_index);
  if (band_limited(*this, model) && max_index > 1)
    throw DomainError("Sinc derivative-pair basis only defines indices 0 and 1");
}

double psf_amplitude(const PsfModel& model, double x, double z) {
  const double u = x - z;
  const double sg = model.sigma;
  if (model.family.kind == PsfKind::Gaussian)
    return std::pow(2.0 * kPi * sg * sg, -0.25) * std::exp(-u * u / (4.0 * sg * sg));
  const double s = model.aperture_scale();
  return sinc(kPi * u / s) / std::sqrt(s);
}

double psf_amplitude_derivative(const PsfModel& model, double x, double z) {
  const double u = x - z;
  const double sg = model.sigma;
  if (model.family.kind == PsfKind::Gaussian)
    return -u / (2.0 * sg * sg) * psf_amplitude(model, x, z);
  const double s = model.aperture_scale();
  return (kPi / s) * sinc_prime(kPi * u / s) / std::sqrt(s);
}

double hermite_poly(int n, double alpha) {
  check_index(n);
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * alpha;
  for (int k = 1; k < n; ++k) {
    double next = 2.0 * alpha * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hg_mode_amplitude(int n, double xR, double sigma, double x) {
  check_index(n);
  const double u = (x - xR) / (std::sqrt(2.0) * sigma);
  return std::pow(2.0 * sigma * sigma, -0.25) * hermite_function(n, u);
}

double mode_amplitude(const ModeBasis& basis, int n, const PsfModel& model, double x) {
  check_index(n);
  if (basis.kind == ModeKind::HermiteGauss) return hg_mode_amplitude(n, basis.xR, model.sigma, x);
  if (n == 0) return psf_amplitude(model, x, basis.xR);
  if (n == 1) return psf_amplitude_derivative(model, x, basis.xR) / std::sqrt(model.norm_factor());
  if (model.family.kind == PsfKind::Sinc)
    throw DomainError("Sinc derivative-pair basis only defines indices 0 and 1");
  return hg_mode_amplitude(n, basis.xR, model.sigma, x);
}

double mode_overlap(const ModeBasis& basis, int n, const PsfModel& model, double z) {
  model.validate();
  check_index(n);
  const double delta = z - basis.xR;
  if (!std::isfinite(delta)) throw DomainError("mode_overlap: displacement must be finite");
  if (band_limited(basis, model)) {
    if (n > 1) throw DomainError("Sinc derivative-pair basis only defines indices 0 and 1");
    const double s = model.aperture_scale();
    const double kmax = kPi / s;
    if (n == 0) {
      auto f = [&](double k) { return s / (2.0 * kPi) * std::cos(k * delta); };
      return integrate(f, -kmax, kmax).value;
    }
    const double rn = std::sqrt(model.norm_factor());
    auto f = [&](double k) { return -s / (2.0 * kPi) * k * std::sin(k * delta) / rn; };
    return integrate(f, -kmax, kmax).value;
  }
  const double half = (20.0 + 2.0 * std::sqrt(double(n))) * model.sigma;
  const double a = std::min(basis.xR, z) - half;
  const double b = std::max(basis.xR, z) + half;
  auto f = [&](double x) { return mode_amplitude(basis, n, model, x) * psf_amplitude(model, x, z); };
  return integrate(f, a, b).value;
}

Eigen::VectorXd mode_overlaps(const ModeBasis& basis, const PsfModel& model, double z) {
  basis.validate(model);
  Eigen::VectorXd c(basis.max_index + 1);
  for (int n = 0; n <= basis.max_index; ++n) c(n) = mode_overlap(basis, n, model, z);
  return c;
}

double psf_overlap(const PsfModel& model, double delta) {
  ModeBasis b{ModeKind::DerivativePair, 0.0, 1};
  return mode_overlap(b, 0, model, delta);
}

double povm_outcome_probability(const Eigen::MatrixXd& effect, const ModeBasis& basis,
                                const Scenario& scenario, Hypothesis h) {
  const int dim = basis.max_index + 1;
  if (effect.rows() != dim || effect.cols() != dim)
    throw DomainError("effect dimension does not match the mode basis");
  double p = 0.0;
  for (const Source& src : sources(scenario, h)) {
    if (src.weight == 0.0) continue;
    Eigen::VectorXd c = mode_overlaps(basis, scenario.psf, src.z);
    p += src.weight * c.dot(effect * c);
  }
  if (p < -1e-10) throw NumericalError("negative outcome probability: broken effect matrix", p);
  return p;
}

}  // namespace superres
