#include "superres/simulate.hpp"

#include <cmath>
#include <limits>

#include "superres/parallel.hpp"

namespace superres {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{lo(seed), hi(seed), lo(index), hi(index)};
  engine_.seed(seq);
}

std::vector<long> sample_outcomes(const OutcomeDistribution& dist, long n, CounterRng& rng) {
  if (n < 0) throw DomainError("sample_outcomes: n must be >= 0");
  const std::size_t k = dist.size();
  std::vector<long> counts(k, 0);
  if (k == 0) return counts;
  std::vector<double> tail(k + 1, 0.0);
  for (std::size_t y = k; y-- > 0;) tail[y] = tail[y + 1] + std::max(0.0, dist.probs[y]);
  long left = n;
  for (std::size_t y = 0; y + 1 < k && left > 0; ++y) {
    const double q = tail[y] > 0.0 ? std::min(1.0, std::max(0.0, dist.probs[y]) / tail[y]) : 0.0;
    std::binomial_distribution<long> b(left, q);
    counts[y] = b(rng.engine());
    left -= counts[y];
  }
  counts[k - 1] += left;
  return counts;
}

LikelihoodTable::LikelihoodTable(const Povm& povm, double theta, PsfFamily family,
                                 Representation rep, int grid_size, double eps_max) {
  if (grid_size < 3) throw DomainError("likelihood grid needs at least 3 points");
  eps_.resize(grid_size);
  logp_.resize(grid_size);
  parallel_for(grid_size, [&](std::size_t k) {
    eps_[k] = eps_max * double(k) / double(grid_size - 1);
    const OutcomeDistribution d = outcome_distribution(
        povm, Scenario::dimensionless(family, theta, theta, eps_[k]), Hypothesis::H2, rep);
    for (double p : d.probs) logp_[k].push_back(safe_log(p));
  });
}

double LikelihoodTable::log_likelihood(const std::vector<long>& counts, std::size_t k) const {
  const std::vector<double>& lp = logp_.at(k);
  if (counts.size() != lp.size()) throw DomainError("counts do not match the POVM outcomes");
  double ll = 0.0;
  for (std::size_t y = 0; y < lp.size(); ++y)
    if (counts[y] > 0) ll += counts[y] * lp[y];
  return ll;
}

MleResult mle_separation(const std::vector<long>& counts, const LikelihoodTable& table) {
  std::size_t best = 0;
  double best_ll = kNegInf;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double ll = table.log_likelihood(counts, k);
    if (ll > best_ll) best_ll = ll, best = k;
  }
  if (best_ll == kNegInf) throw DomainError("counts are impossible for every grid separation");
  MleResult r;
  r.eps = table.eps(best);
  if (best == 0 || best + 1 == table.size()) {
    r.boundary = true;
    return r;
  }
  const double a = table.log_likelihood(counts, best - 1);
  const double c = table.log_likelihood(counts, best + 1);
  const double curv = a - 2.0 * best_ll + c;
  if (std::isfinite(a) && std::isfinite(c) && curv < 0.0)
    r.eps += 0.5 * (a - c) / curv * (table.eps(1) - table.eps(0));
  return r;
}

MleResult mle_separation(const std::vector<long>& counts, const Povm& povm, double theta_known,
                         PsfFamily family) {
  return mle_separation(counts, LikelihoodTable(povm, theta_known, family));
}

Hypothesis decide_hypothesis(const std::vector<long>& counts, const OutcomeDistribution& p1,
                             const OutcomeDistribution& p2) {
  if (counts.size() != p1.size() || p1.labels != p2.labels)
    throw DomainError("decide_hypothesis: counts and distributions disagree on outcomes");
  bool impossible1 = false, impossible2 = false;
  double llr = 0.0;
  for (std::size_t y = 0; y < counts.size(); ++y) {
    if (counts[y] == 0) continue;
    const double a = p1.probs[y], b = p2.probs[y];
    if (a <= 0.0 && b <= 0.0)
      throw DomainError("outcome '" + p1.labels[y] + "' observed but impossible under both hypotheses");
    if (a <= 0.0) impossible1 = true;
    else if (b <= 0.0) impossible2 = true;
    else llr += counts[y] * (std::log(b) - std::log(a));
  }
  if (impossible1 && impossible2)
    throw DomainError("observed counts are impossible under both hypotheses");
  if (impossible1) return Hypothesis::H2;
  if (impossible2) return Hypothesis::H1;
  return llr > 0.0 ? Hypothesis::H2 : Hypothesis::H1;
}

TrialSummary empirical_error_rate(const RunConfig& config) {
  if (config.n_photons < 1 || config.n_trials < 1)
    throw DomainError("need at least one photon and one trial");
  const OutcomeDistribution p1 =
      outcome_distribution(config.povm, config.scenario, Hypothesis::H1, config.rep);
  const OutcomeDistribution p2 =
      outcome_distribution(config.povm, config.scenario, Hypothesis::H2, config.rep);
  TrialSummary s;
  s.decisions.resize(config.n_trials);
  s.truths.resize(config.n_trials);
  parallel_for(config.n_trials, [&](std::size_t t) {
    CounterRng rng(config.seed, t);
    const Hypothesis truth = rng.uniform() < 0.5 ? Hypothesis::H1 : Hypothesis::H2;
    const auto counts =
        sample_outcomes(truth == Hypothesis::H1 ? p1 : p2, config.n_photons, rng);
    s.truths[t] = truth;
    s.decisions[t] = decide_hypothesis(counts, p1, p2);
  });
  for (long t = 0; t < config.n_trials; ++t) s.errors += s.decisions[t] != s.truths[t];
  const double n = double(config.n_trials);
  s.empirical_error = s.errors / n;
  s.standard_error = std::sqrt(s.empirical_error * (1.0 - s.empirical_error) / n);
  s.predicted_exponent = chernoff_exponent_classical(p1, p2).exponent;
  if (s.errors == 0) {
    s.zero_errors = true;
    s.upper_bound = 3.0 / n;
    s.empirical_exponent = -std::log(s.upper_bound) / config.n_photons;
  } else {
    s.empirical_exponent = -std::log(s.empirical_error) / config.n_photons;
  }
  return s;
}

TrialSummary empirical_estimator_variance(const RunConfig& config) {
  if (config.n_photons < 1 || config.n_trials < 2)
    throw DomainError("need at least one photon and two trials");
  const double theta = config.scenario.thetac();
  const LikelihoodTable table(config.povm, theta, config.scenario.psf.family, config.rep);
  const OutcomeDistribution p2 =
      outcome_distribution(config.povm, config.scenario, Hypothesis::H2, config.rep);
  TrialSummary s;
  s.estimates.resize(config.n_trials);
  std::vector<char> boundary(config.n_trials, 0);
  parallel_for(config.n_trials, [&](std::size_t t) {
    CounterRng rng(config.seed, t);
    const MleResult r = mle_separation(sample_outcomes(p2, config.n_photons, rng), table);
    s.estimates[t] = r.eps;
    boundary[t] = r.boundary;
  });
  double sum = 0.0;
  for (long t = 0; t < config.n_trials; ++t) {
    sum += s.estimates[t];
    s.boundary_hits += boundary[t];
  }
  s.mean = sum / config.n_trials;
  double ss = 0.0;
  for (double e : s.estimates) ss += (e - s.mean) * (e - s.mean);
  s.empirical_variance = ss / (config.n_trials - 1);
  const FisherMatrix f =
      cfi_matrix(config.povm, config.scenario, config.rep, BucketPolicy::Outcome);
  s.crb = 1.0 / (config.n_photons * f.eps_eps());
  s.biased_regime = s.boundary_hits > 0;
  return s;
}

}  // namespace superres
