#include "superres/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "superres/discrimination.hpp"
#include "superres/estimation.hpp"
#include "superres/simulate.hpp"

namespace superres {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

const PsfFamily kFamilies[] = {PsfFamily::gaussian(), PsfFamily::sinc_aperture()};

CheckResult check(const std::string& name, double worst, double tol, const std::string& detail = "") {
  return {name, worst <= tol, worst, tol, detail};
}

double povm_defect(const Povm& p) {
  try {
    p.validate();
  } catch (const DomainError&) {
    return 1.0;
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(p.dim(), p.dim());
  double neg = 0.0;
  for (const Effect& e : p.effects) {
    sum += e.op;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.op);
    neg = std::max(neg, -es.eigenvalues().minCoeff());
  }
  return std::max(neg, (sum - Eigen::MatrixXd::Identity(p.dim(), p.dim())).cwiseAbs().maxCoeff());
}

CheckResult povm_invariants() {
  double worst = 0.0;
  worst = std::max(worst, povm_defect(spade_povm(kDefaultMaxIndex)));
  for (PovmSpace sp : {PovmSpace::Qubit, PovmSpace::ModeSpace}) {
    worst = std::max(worst, povm_defect(bspade_povm(sp)));
    worst = std::max(worst, povm_defect(spade01_povm(sp)));
    for (const PsfFamily& f : kFamilies)
      for (double th : linspace(-1.0, 1.0, 21)) worst = std::max(worst, povm_defect(rotade_povm(th, f, sp)));
  }
  for (double t0 : linspace(-0.5, 0.5, 5))
    for (double tc : linspace(-0.5, 0.5, 5))
      for (double e : linspace(0.0, 0.5, 6))
        worst = std::max(worst, povm_defect(helstrom_povm(gamma_matrix(t0, tc, e))));
  // Born-rule sums in both representations.
  for (double th : linspace(0.0, 0.3, 4))
    for (double e : linspace(0.0, 0.3, 4)) {
      const Scenario s = Scenario::dimensionless(PsfFamily::gaussian(), th, th, e);
      for (Representation rep : {Representation::QubitModel, Representation::FullModel})
        for (Hypothesis h : {Hypothesis::H1, Hypothesis::H2}) {
          const OutcomeDistribution d = outcome_distribution(rotade_povm(th), s, h, rep);
          double sum = 0.0;
          for (double p : d.probs) sum += p;
          worst = std::max(worst, std::abs(sum - 1.0));
        }
    }
  return check("povm_completeness_positivity", worst, 1e-10);
}

CheckResult density_invariants() {
  double worst = 0.0;
  for (const PsfFamily& f : kFamilies)
    for (QubitConvention c : {QubitConvention::Exact, QubitConvention::BlochApprox})
      for (double th : linspace(-1.0, 1.0, 21))
        for (double e : linspace(0.0, f.kind == PsfKind::Gaussian ? 1.0 : 0.5, 11)) {
          QubitState rho;
          try {
            rho = qubit_state(Hypothesis::H2, th, e, f, c);
          } catch (const DomainError&) {
            return check("density_matrix_invariants", 1.0, 1e-12, "state rejected inside domain");
          }
          const Eigen::Matrix2d& m = rho.matrix();
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
          const Eigen::Vector3d r = bloch_vector(rho);
          const Eigen::Matrix2d back = QubitState::from_bloch(r).matrix();
          worst = std::max({worst, std::abs(m.trace() - 1.0), std::abs(m(0, 1) - m(1, 0)),
                            -es.eigenvalues().minCoeff(), r.norm() - 1.0,
                            (back - m).cwiseAbs().maxCoeff()});
        }
  return check("density_matrix_invariants", worst, 1e-12);
}

Eigen::Matrix2d approx_state(double th, double e, PsfFamily f) {
  return qubit_state(Hypothesis::H2, th, e, f).matrix();
}

CheckResult sld_relation() {
  const double h = 1e-5;
  double worst = 0.0;
  for (const PsfFamily& f : kFamilies)
    for (double th : {0.0, 0.1, 0.3, 0.5})
      for (double e : {0.05, 0.2, 0.4}) {
        const SldPair L = sld_operators_standard_basis(th, e, f);
        const Eigen::Matrix2d rho = approx_state(th, e, f);
        const Eigen::Matrix2d dth = (approx_state(th + h, e, f) - approx_state(th - h, e, f)) / (2 * h);
        const Eigen::Matrix2d de = (approx_state(th, e + h, f) - approx_state(th, e - h, f)) / (2 * h);
        worst = std::max(worst, (dth - 0.5 * (L.L_theta * rho + rho * L.L_theta)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (de - 0.5 * (L.L_eps * rho + rho * L.L_eps)).cwiseAbs().maxCoeff());
      }
  return check("sld_defining_relation", worst, 1e-6);
}

CheckResult weak_commutation() {
  double worst = 0.0;
  for (const PsfFamily& f : kFamilies)
    for (double th : linspace(-0.5, 0.5, 11))
      for (double e : linspace(0.05, 0.5, 10))
        worst = std::max(worst, std::abs(weak_commutation_check(th, e, f)));
  return check("weak_commutation", worst, 1e-10);
}

CheckResult helstrom_rotade() {
  double worst = 0.0;
  for (const PsfFamily& f : kFamilies)
    for (double th : linspace(-0.5, 0.5, 11))
      for (double e : linspace(0.05, 0.5, 10)) {
        const Povm hp = helstrom_povm(gamma_matrix(th, th, e, f));
        const Povm rp = rotade_povm(th, f, PovmSpace::Qubit);
        for (const Effect& eff : rp.effects)
          worst = std::max(worst, (hp.effect(eff.label).op - eff.op).cwiseAbs().maxCoeff());
      }
  return check("helstrom_equals_rotade", worst, 1e-10);
}

CheckResult loewner_order() {
  double worst = 0.0;
  const std::vector<double> thetas = linspace(0.0, 0.5, 6);
  const std::vector<double> epss = {0.02, 0.1, 0.2, 0.3, 0.4, 0.5};
  for (double th : thetas)
    for (double e : epss) {
      const Scenario s = Scenario::dimensionless(PsfFamily::gaussian(), th, th, e);
      const Eigen::Matrix2d q_qubit = qfi_matrix(th, e).m;
      const Eigen::Matrix2d q_full = qfi_full_model(s).m;
      for (Measurement m : {Measurement::ROTADE, Measurement::BSPADE, Measurement::SPADE01}) {
        const Povm p = make_povm(m, s);
        const Eigen::Matrix2d fq =
            cfi_matrix(p, s, Representation::QubitModel, BucketPolicy::Outcome).m;
        const Eigen::Matrix2d ff =
            cfi_matrix(p, s, Representation::FullModel, BucketPolicy::Outcome).m;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> a(q_qubit - fq), b(q_full - ff);
        worst = std::max({worst, -a.eigenvalues().minCoeff(), -b.eigenvalues().minCoeff()});
      }
    }
  return check("loewner_order", worst, 1e-9);
}

CheckResult sigma_rescaling() {
  double worst = 0.0;
  for (const PsfFamily& f : kFamilies)
    for (auto [th, e] : {std::pair{0.0, 0.1}, std::pair{0.2, 0.05}, std::pair{0.4, 0.3}})
      for (Measurement m : {Measurement::ROTADE, Measurement::BSPADE, Measurement::SPADE01}) {
        std::optional<Eigen::Matrix2d> ref;
        for (double sigma : {1.0, 0.5, 2.0}) {
          const Scenario s = Scenario::dimensionless(f, th, th, e, sigma, 0.7 * sigma);
          const Eigen::Matrix2d fm = cfi_matrix(make_povm(m, s), s).m;
          if (!ref) ref = fm;
          worst = std::max(worst, (fm - *ref).cwiseAbs().maxCoeff());
        }
      }
  return check("sigma_rescaling_invariance", worst, 1e-8);
}

class ThreadOverride {
 public:
  explicit ThreadOverride(const char* value) {
    if (const char* old = std::getenv("SUPERRES_THREADS")) saved_ = old;
    setenv("SUPERRES_THREADS", value, 1);
  }
  ~ThreadOverride() {
    if (saved_) setenv("SUPERRES_THREADS", saved_->c_str(), 1);
    else unsetenv("SUPERRES_THREADS");
  }

 private:
  std::optional<std::string> saved_;
};

CheckResult reproducibility() {
  RunConfig cfg;
  cfg.scenario = Scenario::dimensionless(PsfFamily::gaussian(), 0.3, 0.3, 0.25);
  cfg.povm = rotade_povm(0.3);
  cfg.n_photons = 50;
  cfg.n_trials = 400;
  cfg.seed = 20240607;
  TrialSummary a, b, c;
  {
    ThreadOverride t("1");
    a = empirical_error_rate(cfg);
    b = empirical_error_rate(cfg);
  }
  {
    ThreadOverride t("4");
    c = empirical_error_rate(cfg);
  }
  const bool same = a.decisions == b.decisions && a.truths == b.truths &&
                    a.decisions == c.decisions && a.truths == c.truths &&
                    a.empirical_error == b.empirical_error && a.empirical_error == c.empirical_error;
  return check("seeded_reproducibility", same ? 0.0 : 1.0, 0.0, "serial, repeat and 4 threads");
}

}  // namespace

std::vector<CheckResult> run_selftest() {
  std::vector<CheckResult> out;
  for (auto fn : {povm_invariants, density_invariants, sld_relation, weak_commutation,
                  helstrom_rotade, loewner_order, sigma_rescaling, reproducibility}) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({"exception", false, 1.0, 0.0, e.what()});
    }
  }
  return out;
}

}  // namespace superres
