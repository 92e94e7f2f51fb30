#include "superres/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace superres {

namespace {

using Eigen::MatrixXd;

// Squared quadrature tolerance of the overlaps, and the rounding level of 1 - sum.
constexpr double kAmplitudeFloor = 1e-26;
constexpr double kComplementFloor = 1e-14;

MatrixXd projector(const Eigen::VectorXd& v) { return v * v.transpose(); }

MatrixXd unit_projector(int dim, int n) {
  MatrixXd m = MatrixXd::Zero(dim, dim);
  m(n, n) = 1.0;
  return m;
}

// Adds a complement effect covering I - sum of the existing effects.
void complete(Povm& p, const std::string& label, bool no_click) {
  MatrixXd rest = MatrixXd::Identity(p.dim(), p.dim());
  for (const Effect& e : p.effects) rest -= e.op;
  p.effects.push_back({label, rest, true, no_click});
  if (no_click) p.has_bucket = true;
}

// Two monitored directions in the {|0>, |1>} block plus bucket.
Povm pair_povm(const std::string& l1, const Eigen::Vector2d& v1, const std::string& l2,
               const Eigen::Vector2d& v2, PovmSpace space) {
  Povm p;
  p.space = space;
  p.max_index = 1;
  for (auto [label, v] : {std::pair{l1, v1}, std::pair{l2, v2}}) {
    p.effects.push_back({label, projector(v), false, false});
  }
  complete(p, "bucket", true);
  return p;
}

double clamp_probability(double p, const std::string& label) {
  if (p < -1e-10 || !std::isfinite(p))
    throw NumericalError("outcome '" + label + "' has invalid probability", p);
  return std::max(p, 0.0);
}

}  // namespace

std::vector<std::string> Povm::labels() const {
  std::vector<std::string> out;
  for (const Effect& e : effects) out.push_back(e.label);
  return out;
}

const Effect& Povm::effect(const std::string& label) const {
  for (const Effect& e : effects)
    if (e.label == label) return e;
  throw DomainError("POVM has no outcome '" + label + "'");
}

void Povm::validate() const {
  std::set<std::string> seen;
  MatrixXd sum = MatrixXd::Zero(dim(), dim());
  int complements = 0;
  for (const Effect& e : effects) {
    if (!seen.insert(e.label).second) throw DomainError("duplicate POVM label " + e.label);
    if (e.op.rows() != dim() || e.op.cols() != dim())
      throw DomainError("effect " + e.label + " has wrong dimension");
    if ((e.op - e.op.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw DomainError("effect " + e.label + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(e.op);
    if (es.eigenvalues().minCoeff() < -1e-12) throw DomainError("effect " + e.label + " is not PSD");
    sum += e.op;
    complements += e.complement ? 1 : 0;
  }
  if (complements > 1) throw DomainError("at most one complement effect is allowed");
  if ((sum - MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("POVM effects do not sum to the identity");
}

Povm spade_povm(int max_index) {
  if (max_index < 1) throw DomainError("spade_povm: max_index must be >= 1");
  if (max_index > kMaxHermiteOrder) throw DomainError("spade_povm: max_index too large");
  Povm p;
  p.space = PovmSpace::ModeSpace;
  p.max_index = max_index;
  for (int n = 0; n <= max_index; ++n)
    p.effects.push_back({"mode:" + std::to_string(n), unit_projector(p.dim(), n), false, false});
  complete(p, "bucket", true);
  return p;
}

Povm bspade_povm(PovmSpace space) {
  Povm p;
  p.space = space;
  p.max_index = 1;
  p.effects.push_back({"mode:0", unit_projector(2, 0), false, false});
  complete(p, "mode:rest", false);
  return p;
}

Povm spade01_povm(PovmSpace space) {
  return pair_povm("mode:0", {1.0, 0.0}, "mode:1", {0.0, 1.0}, space);
}

Povm rotade_povm(double theta, PsfFamily family, PovmSpace space) {
  if (!(std::abs(theta) <= 1.0)) throw DomainError("rotade_povm: need |theta| <= 1");
  QubitEigen e = eigendecompose_two_source(theta, 0.0, family);
  return pair_povm("rot:1", e.psi1, "rot:2", e.psi2, space);
}

Povm helstrom_povm(const HelstromGamma& gamma) {
  const Eigen::Matrix2d& g = gamma.m;
  if (std::abs(g.trace()) > 1e-12 || std::abs(g(0, 1) - g(1, 0)) > 1e-12)
    throw DomainError("Gamma must be symmetric and traceless");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g);
  Povm p;
  p.space = PovmSpace::Qubit;
  p.max_index = 1;
  const double lam = es.eigenvalues()(1);
  MatrixXd pos = MatrixXd::Zero(2, 2);
  if (lam > 1e-15) {
    pos = projector(es.eigenvectors().col(1));
  } else {
    p.degenerate = true;
  }
  p.effects.push_back({"rot:1", pos, false, false});
  p.effects.push_back({"rot:2", MatrixXd::Identity(2, 2) - pos, false, false});
  complete(p, "bucket", true);
  return p;
}

Povm embed_in_mode_space(const Povm& povm) {
  if (povm.space == PovmSpace::ModeSpace) return povm;
  Povm p = povm;
  p.space = PovmSpace::ModeSpace;
  p.max_index = 1;
  return p;
}

Povm restrict_to_qubit(const Povm& povm) {
  if (povm.space == PovmSpace::Qubit) return povm;
  Povm p;
  p.space = PovmSpace::Qubit;
  p.max_index = 1;
  p.degenerate = povm.degenerate;
  for (const Effect& e : povm.effects) {
    if (e.complement) continue;
    p.effects.push_back({e.label, e.op.topLeftCorner(2, 2), false, e.no_click});
  }
  for (const Effect& e : povm.effects)
    if (e.complement) complete(p, e.label, e.no_click);
  p.has_bucket = povm.has_bucket;
  return p;
}

const char* to_string(Measurement m) {
  switch (m) {
    case Measurement::ROTADE: return "rotade";
    case Measurement::BSPADE: return "bspade";
    case Measurement::SPADE01: return "spade01";
    case Measurement::Helstrom: return "helstrom";
  }
  return "?";
}

Measurement parse_measurement(const std::string& name) {
  for (Measurement m : {Measurement::ROTADE, Measurement::BSPADE, Measurement::SPADE01,
                        Measurement::Helstrom})
    if (name == to_string(m)) return m;
  throw DomainError("unknown measurement '" + name + "'");
}

Povm make_povm(Measurement m, const Scenario& s, PovmSpace space) {
  switch (m) {
    case Measurement::ROTADE: return rotade_povm(s.thetac(), s.psf.family, space);
    case Measurement::BSPADE: return bspade_povm(space);
    case Measurement::SPADE01: return spade01_povm(space);
    case Measurement::Helstrom: {
      Povm p = helstrom_povm(gamma_matrix(s.theta0(), s.thetac(), s.eps(), s.psf.family));
      return space == PovmSpace::Qubit ? p : embed_in_mode_space(p);
    }
  }
  throw DomainError("unknown measurement");
}

double OutcomeDistribution::at(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return probs[i];
  throw DomainError("distribution has no outcome '" + label + "'");
}

void OutcomeDistribution::validate() const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= -1e-12)) throw DomainError("negative probability in distribution");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("distribution does not sum to 1");
}

OutcomeDistribution outcome_distribution(const Povm& povm, const Scenario& scenario, Hypothesis h,
                                         Representation rep, QubitConvention convention) {
  OutcomeDistribution out;
  std::vector<double> raw(povm.effects.size(), 0.0);

  if (rep == Representation::QubitModel) {
    // Equal weights make the pair state even in eps, so a negative step is allowed.
    if (scenario.w != 0.5) throw DomainError("the qubit model assumes equal intensities");
    const Povm q = restrict_to_qubit(povm);
    const double theta = h == Hypothesis::H1 ? scenario.theta0() : scenario.thetac();
    const auto terms = qubit_decomposition(h, theta, std::abs(scenario.eps()),
                                           scenario.psf.family, convention);
    // The qubit space is the whole state space here, so complements are evaluated
    // from their operators rather than by subtraction.
    for (std::size_t i = 0; i < q.effects.size(); ++i)
      for (const RankOneTerm& t : terms) raw[i] += t.weight * t.v.dot(q.effects[i].op * t.v);
    // restrict_to_qubit moves the complement last; map back by label.
    std::vector<double> mapped(povm.effects.size(), 0.0);
    for (std::size_t i = 0; i < povm.effects.size(); ++i)
      for (std::size_t j = 0; j < q.effects.size(); ++j)
        if (q.effects[j].label == povm.effects[i].label) mapped[i] = raw[j];
    raw = mapped;
  } else {
    const Povm m = embed_in_mode_space(povm);
    ModeBasis basis{ModeKind::DerivativePair, scenario.xR, m.max_index};
    scenario.psf.validate();
    basis.validate(scenario.psf);
    for (const Source& src : sources(scenario, h)) {
      if (src.weight == 0.0) continue;
      const Eigen::VectorXd c = mode_overlaps(basis, scenario.psf, src.z);
      for (std::size_t i = 0; i < m.effects.size(); ++i)
        if (!m.effects[i].complement) raw[i] += src.weight * c.dot(m.effects[i].op * c);
    }
  }

  double monitored = 0.0;
  for (std::size_t i = 0; i < povm.effects.size(); ++i)
    if (!povm.effects[i].complement) monitored += raw[i];
  const bool subtract = rep == Representation::FullModel;
  for (std::size_t i = 0; i < povm.effects.size(); ++i) {
    const Effect& e = povm.effects[i];
    double p = e.complement && subtract ? 1.0 - monitored : raw[i];
    // Below these floors a full-model value is quadrature or cancellation noise, and
    // a spurious nonzero would change which outcomes are possible at all.
    if (subtract && std::abs(p) < (e.complement ? kComplementFloor : kAmplitudeFloor)) p = 0.0;
    out.labels.push_back(e.label);
    out.probs.push_back(clamp_probability(p, e.label));
    out.no_click.push_back(e.no_click);
  }
  return out;
}

}  // namespace superres
