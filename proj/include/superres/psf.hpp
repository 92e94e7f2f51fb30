#pragma once

#include <vector>

#include <Eigen/Dense>

#include "superres/common.hpp"

namespace superres {

enum class PsfKind { Gaussian, Sinc };

// Named after the sinc function used; both amplitudes are unit-norm.
// Unnormalized: (pi*sigma)^(-1/2) sin(u/sigma)/(u/sigma), which makes sigma^2 * N = 1/3.
// Normalized: sigma^(-1/2) sin(pi*u/sigma)/(pi*u/sigma), sigma^2 * N = pi^2/3.
enum class SincConvention { Unnormalized, Normalized };

struct PsfFamily {
  PsfKind kind = PsfKind::Gaussian;
  SincConvention sinc = SincConvention::Unnormalized;

  // sigma^2 times the derivative-mode normalisation N.
  double kappa() const;
  static PsfFamily gaussian() { return {}; }
  static PsfFamily sinc_aperture(SincConvention c = SincConvention::Unnormalized) {
    return {PsfKind::Sinc, c};
  }
};

struct PsfModel {
  PsfFamily family;
  double sigma = 1.0;

  void validate() const;
  // Width s of the sinc amplitude s^(-1/2) sinc(pi u / s); its spectrum is flat on |k| <= pi/s.
  double aperture_scale() const;
  // N = integral of |Psi'|^2.
  double norm_factor() const;
};

// Two equal-or-weighted sources at x1 = xc - 2(1-w)d and x2 = xc + 2wd, so
// their separation is 2d and their intensity-weighted centroid is xc.
// Under H1 a single source sits at x0.
struct Scenario {
  PsfModel psf;
  double d = 0.0;
  double w = 0.5;
  double xR = 0.0;
  double x0 = 0.0;
  double xc = 0.0;

  void validate() const;
  double theta0() const { return (x0 - xR) / psf.sigma; }
  double thetac() const { return (xc - xR) / psf.sigma; }
  double eps() const { return d / psf.sigma; }
  double x1() const { return xc - 2.0 * (1.0 - w) * d; }
  double x2() const { return xc + 2.0 * w * d; }

  static Scenario dimensionless(PsfFamily family, double theta0, double thetac, double eps,
                                double sigma = 1.0, double xR = 0.0);
};

// A point source with its intensity weight.
struct Source {
  double z;
  double weight;
};

// Sources present under a hypothesis. Does not require d >= 0.
std::vector<Source> sources(const Scenario& s, Hypothesis h);

enum class ModeKind { HermiteGauss, DerivativePair };

// DerivativePair: index 0 is Psi(x - xR), index 1 is Psi'(x - xR)/sqrt(N), and for the
// Gaussian PSF indices >= 2 continue with the Hermite-Gauss modes. For the Gaussian,
// index 1 equals minus the first Hermite-Gauss mode.
struct ModeBasis {
  ModeKind kind = ModeKind::DerivativePair;
  double xR = 0.0;
  int max_index = 20;

  void validate(const PsfModel& model) const;
};

inline constexpr int kMaxHermiteOrder = 64;

double psf_amplitude(const PsfModel& model, double x, double z);
double psf_amplitude_derivative(const PsfModel& model, double x, double z);

// Physicists' Hermite polynomial H_n.
double hermite_poly(int n, double alpha);

double hg_mode_amplitude(int n, double xR, double sigma, double x);

// Value of basis function n at x.
double mode_amplitude(const ModeBasis& basis, int n, const PsfModel& model, double x);

// <mode_n | Psi(z)> by adaptive quadrature; Sinc derivative-pair overlaps use the
// band-limited spectrum.
double mode_overlap(const ModeBasis& basis, int n, const PsfModel& model, double z);

// Coefficients <mode_n | Psi(z)> for n = 0..basis.max_index.
Eigen::VectorXd mode_overlaps(const ModeBasis& basis, const PsfModel& model, double z);

// A(delta) = <Psi(0)|Psi(delta)>, by quadrature.
double psf_overlap(const PsfModel& model, double delta);

// Tr(E rho) with rho restricted to the span of the basis. The effect is given in
// the coordinates of `basis`.
double povm_outcome_probability(const Eigen::MatrixXd& effect, const ModeBasis& basis,
                                const Scenario& scenario, Hypothesis h);

}  // namespace superres
