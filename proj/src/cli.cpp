#include "superres/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "superres/discrimination.hpp"
#include "superres/estimation.hpp"
#include "superres/parallel.hpp"
#include "superres/selftest.hpp"
#include "superres/simulate.hpp"

namespace superres {

namespace {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::size_t key_columns = 0;
  std::vector<std::vector<Cell>> rows;
};

struct UsageError : DomainError {
  using DomainError::DomainError;
};

// Numerical failure annotated with the operation and parameters.
// A sweep point failed. Parameters outside an operation's domain count as usage errors.
struct ComputeError : std::runtime_error {
  ComputeError(const std::string& what, const std::exception& cause)
      : std::runtime_error(what), usage(dynamic_cast<const DomainError*>(&cause) != nullptr) {}
  bool usage;
};

struct Common {
  std::string psf = "gaussian";
  std::string sinc_convention = "unnormalized";
  std::string representation = "full";
  std::string bucket = "noclick";
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 1;

  PsfFamily family() const {
    PsfFamily f;
    f.kind = psf == "sinc" ? PsfKind::Sinc : PsfKind::Gaussian;
    f.sinc = sinc_convention == "normalized" ? SincConvention::Normalized : SincConvention::Unnormalized;
    return f;
  }
  Representation rep() const {
    return representation == "qubit" ? Representation::QubitModel : Representation::FullModel;
  }
  BucketPolicy policy() const {
    return bucket == "outcome" ? BucketPolicy::Outcome : BucketPolicy::NoClick;
  }
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell_text(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return fmt(*d);
  if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

bool cell_less(const Cell& a, const Cell& b) {
  auto num = [](const Cell& c) -> std::optional<double> {
    if (auto d = std::get_if<double>(&c)) return *d;
    if (auto i = std::get_if<long long>(&c)) return double(*i);
    return std::nullopt;
  };
  auto na = num(a), nb = num(b);
  if (na && nb) return *na < *nb;
  return cell_text(a) < cell_text(b);
}

void sort_rows(Table& t) {
  std::stable_sort(t.rows.begin(), t.rows.end(), [&](const auto& a, const auto& b) {
    for (std::size_t i = 0; i < t.key_columns; ++i) {
      if (cell_less(a[i], b[i])) return true;
      if (cell_less(b[i], a[i])) return false;
    }
    return false;
  });
}

void write_table(const Table& t, const Common& c, const std::string& command_echo,
                 std::ostream& os) {
  const std::map<std::string, std::string> meta = {
      {"tool", std::string("superres ") + kVersion},
      {"command", command_echo},
      {"seed", std::to_string(c.seed)},
      {"psf", c.psf},
      {"sinc_convention", c.sinc_convention},
      {"representation", c.representation},
      {"bucket", c.bucket},
  };
  if (c.format == "json") {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : meta) j["metadata"][k] = v;
    j["records"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json r;
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        const Cell& cell = row[i];
        if (auto d = std::get_if<double>(&cell)) {
          if (std::isfinite(*d)) r[t.columns[i]] = *d;
          else r[t.columns[i]] = nullptr;
        } else if (auto n = std::get_if<long long>(&cell)) {
          r[t.columns[i]] = *n;
        } else {
          r[t.columns[i]] = std::get<std::string>(cell);
        }
      }
      j["records"].push_back(r);
    }
    os << j.dump(2) << "\n";
    return;
  }
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
    os << "\n";
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

double parse_number(const std::string& s) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double v;
  if (!(is >> v) || !is.eof() || !std::isfinite(v)) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<Measurement> parse_measurements(const std::string& text) {
  std::vector<Measurement> out;
  for (const std::string& s : split_list(text)) {
    try {
      out.push_back(parse_measurement(s));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

// Runs f over n points in parallel and attaches context to numerical failures.
template <class F>
std::vector<std::vector<std::vector<Cell>>> compute(std::size_t n, const std::string& op, F f,
                                                   std::function<std::string(std::size_t)> where) {
  std::vector<std::vector<std::vector<Cell>>> out(n);
  std::vector<std::exception_ptr> failures(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      out[i] = f(i);
    } catch (const std::exception&) {
      failures[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw ComputeError(op + " failed at " + where(i) + ": " + e.what(), e);
    }
  }
  return out;
}

void append(Table& t, std::vector<std::vector<std::vector<Cell>>>&& blocks) {
  for (auto& block : blocks)
    for (auto& row : block) t.rows.push_back(std::move(row));
}

std::string params(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += (s.empty() ? "" : " ") + std::string(k) + "=" + fmt(v);
  return s;
}

double closed_form_epsmin(Measurement m, PsfFamily f, double theta, double n) {
  const double n4 = std::pow(n, 0.25);
  if (f.kind == PsfKind::Gaussian && m == Measurement::ROTADE)
    return std::pow(theta, 1.5) / (std::sqrt(12.0) * n4);
  if (f.kind == PsfKind::Gaussian && m == Measurement::BSPADE) return std::sqrt(theta) / n4;
  if (f.kind == PsfKind::Sinc && f.sinc == SincConvention::Unnormalized && m == Measurement::ROTADE)
    return std::pow(theta, 1.5) / (n4 * std::sqrt(5.0 * std::sqrt(27.0)));
  return std::nan("");
}

struct Options {
  std::string measurement;
  std::string theta, theta0, eps, n;
  std::string fisher_model = "leading";
  std::string mode = "error";
  long trials = 10000;
};

Table run_fisher(const Common& c, const Options& o) {
  const auto ms = parse_measurements(o.measurement);
  const auto thetas = parse_range(o.theta), epss = parse_range(o.eps);
  const PsfFamily fam = c.family();
  Table t;
  t.columns = {"theta", "eps", "measurement", "F_theta_theta", "F_theta_eps", "F_eps_eps",
               "qfi_theta_theta", "qfi_eps_eps", "qfi_full_eps_eps"};
  t.key_columns = 3;
  const std::size_t n = thetas.size() * epss.size();
  append(t, compute(n, "fisher",
                    [&](std::size_t i) {
                      const double th = thetas[i % thetas.size()], e = epss[i / thetas.size()];
                      const Scenario s = Scenario::dimensionless(fam, th, th, e);
                      double q_tt = std::nan(""), q_ee = std::nan(""), q_full = std::nan("");
                      if (e > 0.0) {
                        const FisherMatrix q = qfi_matrix(th, e, fam);
                        q_tt = q.theta_theta();
                        q_ee = q.eps_eps();
                        if (fam.kind == PsfKind::Gaussian && c.rep() == Representation::FullModel)
                          q_full = qfi_full_model(s).eps_eps();
                      }
                      std::vector<std::vector<Cell>> rows;
                      for (Measurement m : ms) {
                        const FisherMatrix f = cfi_matrix(make_povm(m, s), s, c.rep(), c.policy());
                        rows.push_back({th, e, std::string(to_string(m)), f.m(0, 0), f.m(0, 1),
                                        f.m(1, 1), q_tt, q_ee, q_full});
                      }
                      return rows;
                    },
                    [&](std::size_t i) {
                      return params({{"theta", thetas[i % thetas.size()]},
                                     {"eps", epss[i / thetas.size()]}});
                    }));
  return t;
}

Table run_epsmin(const Common& c, const Options& o) {
  const auto ms = parse_measurements(o.measurement);
  const auto thetas = parse_range(o.theta), ns = parse_range(o.n);
  if (o.fisher_model != "leading" && o.fisher_model != "exact")
    throw UsageError("--fisher-model must be leading or exact");
  const FisherModel model = o.fisher_model == "exact" ? FisherModel::Exact : FisherModel::LeadingOrder;
  const PsfFamily fam = c.family();
  Table t;
  t.columns = {"theta", "n", "measurement", "eps_min", "eps_min_closed_form", "coefficient_C"};
  t.key_columns = 3;
  const std::size_t total = thetas.size() * ns.size() * ms.size();
  auto idx = [&](std::size_t i) {
    return std::tuple{thetas[i % thetas.size()], ns[(i / thetas.size()) % ns.size()],
                      ms[i / (thetas.size() * ns.size())]};
  };
  append(t, compute(total, "epsmin",
                    [&](std::size_t i) {
                      const auto [th, n, m] = idx(i);
                      const double em = min_resolvable_separation(m, th, n, fam, model, c.rep());
                      const double cc = small_sep_coefficient(m, th, fam, c.rep()).value;
                      return std::vector<std::vector<Cell>>{
                          {th, n, std::string(to_string(m)), em, closed_form_epsmin(m, fam, th, n), cc}};
                    },
                    [&](std::size_t i) {
                      const auto [th, n, m] = idx(i);
                      return params({{"theta", th}, {"n", n}}) + " measurement=" + to_string(m);
                    }));
  return t;
}

Table run_discriminate(const Common& c, const Options& o) {
  const auto ms = parse_measurements(o.measurement);
  const auto thetas = parse_range(o.theta), epss = parse_range(o.eps);
  const bool offset = !o.theta0.empty();
  const auto theta0s = offset ? parse_range(o.theta0) : std::vector<double>{0.0};
  const PsfFamily fam = c.family();
  Table t;
  t.columns = {"theta0", "thetac", "eps", "measurement", "type1", "type2", "total", "success",
               "no_click"};
  t.key_columns = 4;
  const std::size_t n = thetas.size() * epss.size() * theta0s.size();
  auto idx = [&](std::size_t i) {
    const double tc = thetas[i % thetas.size()];
    const double e = epss[(i / thetas.size()) % epss.size()];
    const double t0 = offset ? theta0s[i / (thetas.size() * epss.size())] : tc;
    return std::tuple{t0, tc, e};
  };
  append(t, compute(n, "discriminate",
                    [&](std::size_t i) {
                      const auto [t0, tc, e] = idx(i);
                      const Scenario s = Scenario::dimensionless(fam, t0, tc, e);
                      std::vector<std::vector<Cell>> rows;
                      for (Measurement m : ms) {
                        const ErrorRates r = error_probabilities(make_povm(m, s), s, c.rep(), c.policy());
                        rows.push_back({t0, tc, e, std::string(to_string(m)), r.type1, r.type2,
                                        r.total, r.success, r.no_click});
                      }
                      return rows;
                    },
                    [&](std::size_t i) {
                      const auto [t0, tc, e] = idx(i);
                      return params({{"theta0", t0}, {"thetac", tc}, {"eps", e}});
                    }));
  return t;
}

Table run_chernoff(const Common& c, const Options& o) {
  const auto ms = parse_measurements(o.measurement);
  const auto thetas = parse_range(o.theta), epss = parse_range(o.eps);
  Table t;
  t.columns = {"theta", "eps"};
  for (Measurement m : ms) t.columns.push_back(std::string("xi_") + to_string(m));
  t.columns.push_back("xi_qm");
  t.key_columns = 2;
  std::vector<ChernoffRow> rows;
  try {
    rows = chernoff_curves(ms, thetas, epss, c.family(), c.rep());
  } catch (const std::exception& e) {
    throw ComputeError(std::string("chernoff_curves failed: ") + e.what(), e);
  }
  for (const ChernoffRow& r : rows) {
    std::vector<Cell> row = {r.theta, r.eps};
    for (double x : r.xi) row.push_back(x);
    row.push_back(r.xi_qm);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table run_montecarlo(const Common& c, const Options& o) {
  const auto ms = parse_measurements(o.measurement);
  const auto thetas = parse_range(o.theta), epss = parse_range(o.eps), ns = parse_range(o.n);
  if (o.mode != "error" && o.mode != "variance") throw UsageError("--mode must be error or variance");
  if (o.trials < 2) throw UsageError("--trials must be >= 2");
  for (double n : ns)
    if (n < 1 || n != std::floor(n)) throw UsageError("--n must list positive integers");
  const PsfFamily fam = c.family();
  Table t;
  if (o.mode == "error")
    t.columns = {"theta", "eps", "n", "measurement", "trials", "errors", "p_hat", "std_error",
                 "upper_bound", "empirical_exponent", "predicted_exponent", "single_shot_error"};
  else
    t.columns = {"theta", "eps", "n", "measurement", "trials", "mean", "variance", "crb",
                 "variance_over_crb", "boundary_hits"};
  t.key_columns = 4;
  // Trials are parallel inside each run; points run one after another.
  for (Measurement m : ms)
    for (double th : thetas)
      for (double e : epss)
        for (double n : ns) {
          try {
            RunConfig cfg;
            cfg.scenario = Scenario::dimensionless(fam, th, th, e);
            cfg.povm = make_povm(m, cfg.scenario);
            cfg.n_photons = static_cast<long>(n);
            cfg.n_trials = o.trials;
            cfg.seed = c.seed;
            cfg.rep = c.rep();
            const std::string name = to_string(m);
            if (o.mode == "error") {
              const TrialSummary s = empirical_error_rate(cfg);
              const ErrorRates r =
                  error_probabilities(cfg.povm, cfg.scenario, cfg.rep, BucketPolicy::Outcome);
              t.rows.push_back({th, e, n, name, (long long)o.trials, (long long)s.errors,
                                s.empirical_error, s.standard_error,
                                s.zero_errors ? s.upper_bound : std::nan(""), s.empirical_exponent,
                                s.predicted_exponent, cfg.n_photons == 1 ? r.total : std::nan("")});
            } else {
              const TrialSummary s = empirical_estimator_variance(cfg);
              t.rows.push_back({th, e, n, name, (long long)o.trials, s.mean, s.empirical_variance,
                                s.crb, s.empirical_variance / s.crb, (long long)s.boundary_hits});
            }
          } catch (const std::exception& ex) {
            throw ComputeError("montecarlo failed at " +
                               params({{"theta", th}, {"eps", e}, {"n", n}}) + ": " + ex.what(), ex);
          }
        }
  return t;
}

Table run_intrinsic(const Common& c, const Options& o) {
  const auto thetas = parse_range(o.theta), epss = parse_range(o.eps);
  const bool offset = !o.theta0.empty();
  const auto theta0s = offset ? parse_range(o.theta0) : std::vector<double>{0.0};
  const PsfFamily fam = c.family();
  Table t;
  t.columns = {"theta0", "thetac", "eps", "p_err", "p_suc", "p_intrinsic"};
  t.key_columns = 3;
  const std::size_t n = thetas.size() * epss.size() * theta0s.size();
  auto idx = [&](std::size_t i) {
    const double tc = thetas[i % thetas.size()];
    const double e = epss[(i / thetas.size()) % epss.size()];
    const double t0 = offset ? theta0s[i / (thetas.size() * epss.size())] : tc;
    return std::tuple{t0, tc, e};
  };
  append(t, compute(n, "intrinsic_error",
                    [&](std::size_t i) {
                      const auto [t0, tc, e] = idx(i);
                      const Scenario s = Scenario::dimensionless(fam, t0, tc, e);
                      const IntrinsicError r = intrinsic_error(s, rotade_povm(tc, fam), c.rep());
                      return std::vector<std::vector<Cell>>{{t0, tc, e, r.p_err, r.p_suc, r.p_intrinsic}};
                    },
                    [&](std::size_t i) {
                      const auto [t0, tc, e] = idx(i);
                      return params({{"theta0", t0}, {"thetac", tc}, {"eps", e}});
                    }));
  return t;
}

Table run_selftest_table(bool& all_passed) {
  Table t;
  t.columns = {"check", "passed", "value", "tolerance", "detail"};
  t.key_columns = 0;
  all_passed = true;
  for (const CheckResult& r : run_selftest()) {
    all_passed = all_passed && r.passed;
    t.rows.push_back({r.name, std::string(r.passed ? "true" : "false"), r.value, r.tolerance, r.detail});
  }
  return t;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--psf", c.psf, "PSF shape")->check(CLI::IsMember({"gaussian", "sinc"}));
  sub->add_option("--sinc-convention", c.sinc_convention, "Sinc function in the aperture PSF")
      ->check(CLI::IsMember({"unnormalized", "normalized"}));
  sub->add_option("--representation", c.representation, "State model")
      ->check(CLI::IsMember({"full", "qubit"}));
  sub->add_option("--bucket", c.bucket, "Treatment of no-click outcomes")
      ->check(CLI::IsMember({"noclick", "outcome"}));
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output,-o", c.output, "Output file (default: standard output)");
  sub->add_option("--seed", c.seed, "Random seed");
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  if (text.empty()) throw UsageError("empty range");
  const auto colon = std::count(text.begin(), text.end(), ':');
  if (colon == 0) {
    std::vector<double> out;
    for (const std::string& s : split_list(text)) out.push_back(parse_number(s));
    return out;
  }
  if (colon != 2) throw UsageError("range must be start:stop:count, got '" + text + "'");
  const auto a = text.find(':'), b = text.rfind(':');
  const double start = parse_number(text.substr(0, a));
  const double stop = parse_number(text.substr(a + 1, b - a - 1));
  const double count = parse_number(text.substr(b + 1));
  if (count < 1 || count != std::floor(count)) throw UsageError("range count must be a positive integer");
  const long n = static_cast<long>(count);
  if (n == 1 && start != stop) throw UsageError("a one-point range needs start == stop");
  std::vector<double> out(n);
  for (long i = 0; i < n; ++i) out[i] = n == 1 ? start : start + (stop - start) * double(i) / double(n - 1);
  if (n > 1) out[n - 1] = stop;
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-source superresolution under demultiplexer misalignment"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Common c;
  Options of, oe, od, oc, om, oi;

  auto* fisher = app.add_subcommand("fisher", "Classical and quantum Fisher information");
  auto* epsmin = app.add_subcommand("epsmin", "Minimal resolvable separation");
  auto* disc = app.add_subcommand("discriminate", "Single-shot error probabilities");
  auto* chern = app.add_subcommand("chernoff", "Chernoff exponents per measurement and quantum bound");
  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo error rates or estimator variance");
  auto* intr = app.add_subcommand("intrinsic-error", "Mass lost outside the monitored mode pair");
  auto* self = app.add_subcommand("selftest", "Structural invariant suite");
  for (auto* s : {fisher, epsmin, disc, chern, mc, intr, self}) add_common(s, c);

  fisher->add_option("--measurement", of.measurement)->default_val("rotade,bspade,spade01");
  fisher->add_option("--theta", of.theta)->default_val("0:0.5:6");
  fisher->add_option("--eps", of.eps)->default_val("0.01:0.5:50");

  epsmin->add_option("--measurement", oe.measurement)->default_val("rotade,bspade");
  epsmin->add_option("--theta", oe.theta)->default_val("0.02:0.1:5");
  epsmin->add_option("--n", oe.n)->default_val("1000,10000");
  epsmin->add_option("--fisher-model", oe.fisher_model, "leading (F = C eps^2) or exact")
      ->check(CLI::IsMember({"leading", "exact"}));

  disc->add_option("--measurement", od.measurement)->default_val("rotade,spade01,bspade,helstrom");
  disc->add_option("--theta", od.theta, "Centroid misalignment")->default_val("0:0.5:11");
  disc->add_option("--theta0", od.theta0, "Single-source misalignment (default: same as --theta)");
  disc->add_option("--eps", od.eps)->default_val("0.25");

  chern->add_option("--measurement", oc.measurement)->default_val("rotade,spade01,bspade");
  chern->add_option("--theta", oc.theta)->default_val("0:0.5:51");
  chern->add_option("--eps", oc.eps)->default_val("0.25");

  mc->add_option("--measurement", om.measurement)->default_val("rotade");
  mc->add_option("--theta", om.theta)->default_val("0.3");
  mc->add_option("--eps", om.eps)->default_val("0.25");
  mc->add_option("--n", om.n)->default_val("200");
  mc->add_option("--trials", om.trials)->default_val("10000");
  mc->add_option("--mode", om.mode)->check(CLI::IsMember({"error", "variance"}));

  intr->add_option("--theta", oi.theta, "Centroid misalignment")->default_val("-1:1:81");
  intr->add_option("--theta0", oi.theta0, "Single-source misalignment (default: same as --theta)");
  intr->add_option("--eps", oi.eps)->default_val("0.1,0.25,0.5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string echo;
  for (int i = 1; i < argc; ++i) echo += (i > 1 ? " " : "") + std::string(argv[i]);

  Table table;
  int status = 0;
  try {
    if (fisher->parsed()) table = run_fisher(c, of);
    else if (epsmin->parsed()) table = run_epsmin(c, oe);
    else if (disc->parsed()) table = run_discriminate(c, od);
    else if (chern->parsed()) table = run_chernoff(c, oc);
    else if (mc->parsed()) table = run_montecarlo(c, om);
    else if (intr->parsed()) table = run_intrinsic(c, oi);
    else {
      bool ok = false;
      table = run_selftest_table(ok);
      status = ok ? 0 : 2;
    }
  } catch (const UsageError& e) {
    err << "superres: usage error: " << e.what() << "\n";
    return 1;
  } catch (const ComputeError& e) {
    err << "superres: " << (e.usage ? "usage error: " : "") << e.what() << "\n";
    return e.usage ? 1 : 2;
  } catch (const std::exception& e) {
    err << "superres: numerical failure: " << e.what() << "\n";
    return 2;
  }
  sort_rows(table);

  if (c.output.empty()) {
    write_table(table, c, echo, out);
  } else {
    std::ofstream file(c.output, std::ios::binary);
    if (!file) {
      err << "superres: usage error: cannot write " << c.output << "\n";
      return 1;
    }
    write_table(table, c, echo, file);
    if (!file) {
      err << "superres: failed writing " << c.output << "\n";
      return 2;
    }
  }
  return status;
}

}  // namespace superres
