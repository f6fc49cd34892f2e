#include "cvxtau/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "cvxtau/concentration.hpp"
#include "cvxtau/errors.hpp"
#include "cvxtau/infconv.hpp"
#include "cvxtau/poincare.hpp"
#include "cvxtau/serialize.hpp"
#include "cvxtau/tauverify.hpp"

namespace cvxtau::cli {
namespace {

constexpr const char* kSchema = "cvxtau.records/1";

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format = "table";
  bool quiet = false;
};

/// Accumulates both output formats; the caller picks one.
struct Report {
  std::vector<Json> records;
  std::ostringstream table;
  bool violated = false;

  void record(const std::string& type, Json body) {
    body["schema"] = kSchema;
    body["type"] = type;
    records.push_back(std::move(body));
  }
};

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(8) << v;
  return os.str();
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(v > 0 ? "inf" : "-inf"); }

std::vector<double> number_list(const Json& j, const std::string& key) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(key + ": expected a number or a list of numbers");
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double number_or(const Json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg.at(key).is_number()) throw ConfigError(std::string(key) + ": expected a number");
  return cfg.at(key).get<double>();
}

int int_or(const Json& cfg, const char* key, int fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string(key) + ": expected a nonnegative integer");
  }
  return v.get<int>();
}

std::uint64_t require_seed(const Options& opts, const Json& cfg) {
  if (opts.seed) return *opts.seed;
  if (cfg.contains("seed")) {
    if (!cfg.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
    return cfg.at("seed").get<std::uint64_t>();
  }
  throw ConfigError("this command is randomized: pass --seed or set \"seed\" in the config");
}

Measure1D config_measure(const Json& cfg) {
  if (!cfg.contains("measure")) throw ConfigError("missing key 'measure'");
  return measure_from_json(cfg.at("measure"));
}

// ---- analyze ---------------------------------------------------------------

void cmd_analyze(const Json& cfg, Report& rep) {
  reject_unknown_keys(cfg, {"measure", "h", "seed"}, "config");
  const auto mu = config_measure(cfg);
  const auto hs = cfg.contains("h") ? number_list(cfg.at("h"), "h") : std::vector<double>{1.0};

  double b = kInf;
  double bprime = kInf;
  bool has_b = true;
  try {
    b = muckenhoupt_B(mu);
    bprime = bobkov_goetze_Bprime(mu);
  } catch (const NoDensity&) {
    has_b = false;
  }

  rep.table << "measure " << mu.id() << "\n";
  rep.table << std::left << std::setw(12) << "h" << std::setw(16) << "lambda_star" << std::setw(14)
            << "witness" << std::setw(16) << "C_tau" << "C_p\n";
  for (double h : hs) {
    const auto cert = lambda_star(mu, h);
    const bool in_class = cert.lambda_star < 1.0;
    const double c_tau = in_class ? theorem_c_tau(h, cert.lambda_star) : kInf;
    const double c_p = in_class ? theorem_c_p(c_tau) : kInf;
    rep.table << std::setw(12) << fmt(h) << std::setw(16) << fmt(cert.lambda_star) << std::setw(14)
              << fmt(cert.witness) << std::setw(16) << fmt(c_tau) << fmt(c_p) << "\n";
    rep.record("analyze.lambda", {{"measure", mu.id()},
                                  {"h", h},
                                  {"lambda_star", cert.lambda_star},
                                  {"witness", cert.witness},
                                  {"attained", cert.attained},
                                  {"c_tau", num(c_tau)},
                                  {"c_p", num(c_p)}});
  }
  if (has_b) {
    rep.table << "B  = " << fmt(b) << "  (Poincare constant in [" << fmt(b / ((1.0 + std::sqrt(2.0)) * (1.0 + std::sqrt(2.0))))
              << ", " << fmt(4.0 * b) << "])\n";
    rep.table << "B' = " << fmt(bprime) << "\n";
  } else {
    rep.table << "B, B': undefined (no density on (0, inf))\n";
  }
  rep.record("analyze.muckenhoupt", {{"measure", mu.id()},
                                     {"B", has_b ? num(b) : Json(nullptr)},
                                     {"B_prime", has_b ? num(bprime) : Json(nullptr)}});
}

// ---- tau -------------------------------------------------------------------

void cmd_tau(const Json& cfg, std::uint64_t seed, Report& rep) {
  reject_unknown_keys(cfg,
                      {"measure", "h", "lambda", "trials", "seed", "suites", "c_tau_override", "c_tau_scale",
                       "hill_climb_steps"},
                      "config");
  const auto mu = config_measure(cfg);
  const double h = number_or(cfg, "h", 1.0);
  const int trials = int_or(cfg, "trials", 200);
  std::vector<std::string> suites{"a_implies_c", "bound", "bob", "bobex", "c_implies_b"};
  if (cfg.contains("suites")) {
    suites.clear();
    for (const auto& s : cfg.at("suites")) {
      const auto name = s.get<std::string>();
      if (name != "a_implies_c" && name != "bound" && name != "bob" && name != "bobex" && name != "c_implies_b") {
        throw ConfigError("suites: unknown suite '" + name + "'");
      }
      suites.push_back(name);
    }
  }
  auto wants = [&](const char* s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };

  const auto cert = lambda_star(mu, h);
  if (!(cert.lambda_star < 1.0)) throw NotInClass("lambda_star(h) = 1; pick a larger h");
  const double lambda = number_or(cfg, "lambda", cert.lambda_star);

  TauSuiteOptions options;
  options.trials = trials;
  options.seed = seed;
  options.c_tau_scale = number_or(cfg, "c_tau_scale", 1.0);
  if (cfg.contains("c_tau_override")) options.c_tau_override = number_or(cfg, "c_tau_override", 0.0);
  options.hill_climb_steps = int_or(cfg, "hill_climb_steps", 200);
  const double c_tau = options.c_tau_override ? *options.c_tau_override
                                              : options.c_tau_scale * theorem_c_tau(h, lambda);

  rep.table << "measure " << mu.id() << "  h = " << fmt(h) << "  lambda = " << fmt(lambda)
            << "  C_tau = " << fmt(c_tau) << "\n";
  rep.table << std::left << std::setw(14) << "suite" << std::setw(10) << "checks" << std::setw(12)
            << "violations" << "worst\n";
  auto row = [&](const std::string& name, int checks, int violations, double worst, const char* what) {
    rep.table << std::setw(14) << name << std::setw(10) << checks << std::setw(12) << violations << what
              << " " << fmt(worst) << "\n";
    if (violations > 0) rep.violated = true;
  };

  if (wants("a_implies_c")) {
    const auto summary = certify_a_implies_c(mu, h, options);
    for (const auto& r : summary.records) {
      rep.record("tau.trial", {{"suite", "a_implies_c"},
                               {"index", r.index},
                               {"origin", r.origin},
                               {"measure", r.report.measure_id},
                               {"function", to_json(r.f)},
                               {"c_tau", r.report.c_tau},
                               {"product", num(r.report.lhs_product)},
                               {"margin", num(r.report.margin)},
                               {"error_bound", r.report.error_bound},
                               {"divergent", r.divergent},
                               {"violated", r.violated}});
    }
    Json body{{"suite", "a_implies_c"},   {"trials", summary.trials},
              {"violations", summary.violations}, {"divergent", summary.divergent},
              {"worst_margin", num(summary.worst_margin)}, {"max_error_bound", summary.max_error_bound},
              {"c_tau", summary.c_tau}};
    if (summary.worst) body["witness"] = to_json(summary.worst->f);
    rep.record("tau.summary", body);
    row("a_implies_c", summary.trials, summary.violations, summary.worst_margin, "min margin");
    if (summary.violations > 0 && summary.worst) {
      rep.table << "  witness " << to_json(summary.worst->f).dump() << "\n";
    }
  }

  if (wants("bound")) {
    const double c1 = 17.0 / ((1.0 - lambda) * (1.0 - lambda));
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    RandomPLOptions gen;
    gen.max_abs_slope = 1.0 / (c1 * h);
    int violations = 0;
    double worst = -kInf;
    for (int i = 0; i < trials; ++i) {
      const auto f = random_plconvex(rng, gen);
      const auto probes = default_probe_grid(f, h, 1e-2);
      const auto r = lemma_bound_certificate(f, c1, h, probes);
      worst = std::max(worst, r.max_violation);
      if (r.max_violation > 1e-9) ++violations;
    }
    rep.record("tau.summary", {{"suite", "bound"}, {"trials", trials}, {"violations", violations},
                               {"max_violation", num(worst)}, {"c1", c1}});
    row("bound", trials, violations, worst, "max violation");
  }

  if (wants("bob")) {
    const auto s = lemma_bob_suite(mu, h, lambda, trials, seed + 1);
    rep.record("tau.summary", {{"suite", "bob"}, {"trials", trials}, {"violations", s.violations},
                               {"worst_ratio", s.worst_ratio}});
    row("bob", trials, s.violations, s.worst_ratio, "max lhs/rhs");
  }

  if (wants("bobex")) {
    const auto s = lemma_bobex_suite(mu, h, lambda, trials, seed + 2);
    rep.record("tau.summary", {{"suite", "bobex"}, {"trials", trials}, {"violations", s.violations},
                               {"monotone", s.monotone}, {"reflected", s.reflected},
                               {"non_monotone", s.non_monotone}, {"worst_ratio", s.worst_ratio}});
    row("bobex", trials, s.violations, s.worst_ratio, "max lhs/rhs");
  }

  if (wants("c_implies_b")) {
    const auto s = certify_c_implies_b(mu, c_tau, trials, seed + 3);
    rep.record("tau.summary", {{"suite", "c_implies_b"}, {"trials", trials}, {"violations", s.violations},
                               {"c_p", s.c_p}, {"worst_ratio", s.worst_ratio}});
    row("c_implies_b", trials, s.violations, s.worst_ratio, "max Var/energy");
  }
}

// ---- poincare --------------------------------------------------------------

void cmd_poincare(const Json& cfg, std::uint64_t seed, Report& rep) {
  reject_unknown_keys(cfg, {"measure", "cp", "trials", "u_grid_points", "seed"}, "config");
  const auto mu = config_measure(cfg);
  const int trials = int_or(cfg, "trials", 200);
  const auto grid = default_u_grid(mu, int_or(cfg, "u_grid_points", 256));
  const auto est = cp_lower_bound(mu, grid, trials, seed);
  const double cp = number_or(cfg, "cp", est.cp_lower);
  if (!(cp > 0.0)) throw ConfigError("cp: no positive Poincare constant available");
  const auto b_to_a = certify_b_implies_a(mu, cp);
  if (!b_to_a.pass) rep.violated = true;

  rep.table << "measure " << mu.id() << "\n";
  rep.table << "cp_lower     " << fmt(est.cp_lower) << "  (witness " << est.witness_id << ", " << est.probes
            << " probes)\n";
  Json sandwich = nullptr;
  try {
    const double b = muckenhoupt_B(mu);
    const bool ok = est.cp_lower <= 4.0 * b + 1e-9;
    if (!ok) rep.violated = true;
    rep.table << "4B           " << fmt(4.0 * b) << (ok ? "  (cp_lower <= 4B)" : "  VIOLATED cp_lower <= 4B") << "\n";
    sandwich = Json{{"B", num(b)}, {"upper", num(4.0 * b)}, {"pass", ok}};
  } catch (const NoDensity&) {
    rep.table << "4B           undefined (no density)\n";
  }
  rep.table << "b => a       cp = " << fmt(cp) << ", h = sqrt(8 cp) = " << fmt(b_to_a.h)
            << ", lambda_star = " << fmt(b_to_a.membership.lambda_star)
            << (b_to_a.pass ? " <= 1/2" : " > 1/2  VIOLATED") << "\n";
  rep.table << "hinge slack  " << fmt(b_to_a.hinge_slack) << " at u = " << fmt(b_to_a.hinge_slack_at) << "\n";

  Json estimate{{"measure", mu.id()},
                {"cp_lower", est.cp_lower},
                {"witness_id", est.witness_id},
                {"probes", est.probes},
                {"muckenhoupt", sandwich}};
  if (est.witness) estimate["witness"] = to_json(*est.witness);
  rep.record("poincare.estimate", estimate);
  rep.record("poincare.b_implies_a", {{"measure", mu.id()},
                                       {"cp", cp},
                                       {"h", b_to_a.h},
                                       {"lambda_star", b_to_a.membership.lambda_star},
                                       {"witness", b_to_a.membership.witness},
                                       {"hinge_slack", num(b_to_a.hinge_slack)},
                                       {"pass", b_to_a.pass}});
}

// ---- concentrate -----------------------------------------------------------

void emit_rows(const ConcentrationReport& r, Report& rep) {
  rep.table << r.experiment << " on " << r.set_family << (r.exact ? "" : " (superset proxy)")
            << "  C_tau = " << fmt(r.c_tau) << "  mu(A) ~ " << fmt(r.base_probability) << "  samples "
            << r.samples << "\n";
  rep.table << std::left << std::setw(10) << "t" << std::setw(14) << "empirical" << std::setw(14) << "bound"
            << std::setw(14) << "radius" << "pass\n";
  for (const auto& row : r.rows) {
    rep.table << std::setw(10) << fmt(row.t) << std::setw(14) << fmt(row.empirical) << std::setw(14)
              << fmt(row.bound) << std::setw(14) << fmt(row.radius) << (row.pass ? "yes" : "NO") << "\n";
    rep.record("concentrate.row", {{"experiment", r.experiment},
                                   {"set", r.set_family},
                                   {"exact", r.exact},
                                   {"t", row.t},
                                   {"empirical", row.empirical},
                                   {"bound", row.bound},
                                   {"radius", row.radius},
                                   {"pass", row.pass}});
  }
  if (!r.pass()) rep.violated = true;
}

void cmd_concentrate(const Json& cfg, std::uint64_t seed, Report& rep) {
  reject_unknown_keys(cfg,
                      {"experiment", "measure", "dimension", "set", "function", "a", "b", "h", "lambda",
                       "c_tau", "t_grid", "samples", "seed"},
                      "config");
  if (!cfg.contains("experiment")) throw ConfigError("missing key 'experiment'");
  const auto experiment = cfg.at("experiment").get<std::string>();
  const auto mu = config_measure(cfg);
  const int n = int_or(cfg, "dimension", 1);
  if (n < 1) throw ConfigError("dimension: must be at least 1");
  const auto pm = ProductMeasure::iid(mu, n);
  const auto t_grid = cfg.contains("t_grid") ? number_list(cfg.at("t_grid"), "t_grid")
                                             : std::vector<double>{0.5, 1.0, 2.0, 4.0};
  const auto samples = static_cast<Eigen::Index>(int_or(cfg, "samples", 100000));
  const double h = number_or(cfg, "h", 1.0);
  auto lambda = [&] { return number_or(cfg, "lambda", lambda_star(mu, h).lambda_star); };

  if (experiment == "corr1" || experiment == "gencon") {
    if (!cfg.contains("set")) throw ConfigError("missing key 'set'");
    const auto set = convex_set_from_json(cfg.at("set"), n);
    const auto report = experiment == "corr1"
                            ? verify_corr1(pm, set, h, lambda(), t_grid, samples, seed)
                            : verify_gencon(pm, set, number_or(cfg, "c_tau", theorem_c_tau(h, lambda())), t_grid,
                                            samples, seed);
    emit_rows(report, rep);
    return;
  }
  if (experiment == "corr2") {
    if (!cfg.contains("function")) throw ConfigError("missing key 'function'");
    const auto f = lipschitz_from_json(cfg.at("function"), n);
    const double a = number_or(cfg, "a", 1.0);
    const double b = number_or(cfg, "b", 1.0);
    const auto r = verify_corr2(pm, f, a, b, h, lambda(), t_grid, samples, seed);
    rep.table << "corr2 on " << r.function_family << "  C_tau = " << fmt(r.c_tau) << "  median " << fmt(r.median)
              << " in [" << fmt(r.median_lo) << ", " << fmt(r.median_hi) << "]  samples " << r.samples << "\n";
    rep.table << std::left << std::setw(10) << "t" << std::setw(14) << "bound" << std::setw(14) << "upper"
              << std::setw(14) << "lower" << "pass\n";
    for (const auto& row : r.rows) {
      const bool ok = row.upper_pass && row.lower_pass;
      rep.table << std::setw(10) << fmt(row.t) << std::setw(14) << fmt(row.bound) << std::setw(14)
                << fmt(row.upper_empirical) << std::setw(14) << fmt(row.lower_empirical) << (ok ? "yes" : "NO")
                << "\n";
      rep.record("concentrate.corr2", {{"function", r.function_family},
                                       {"t", row.t},
                                       {"bound", row.bound},
                                       {"upper", row.upper_empirical},
                                       {"upper_radius", row.upper_radius},
                                       {"upper_pass", row.upper_pass},
                                       {"lower", row.lower_empirical},
                                       {"lower_radius", row.lower_radius},
                                       {"lower_pass", row.lower_pass}});
    }
    if (!r.pass()) rep.violated = true;
    return;
  }
  throw ConfigError("experiment: expected corr1, gencon or corr2, got '" + experiment + "'");
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
}

int dispatch(const Options& opts, std::ostream& out, std::ostream& err) {
  const Json cfg = load_config(opts.config_path);
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  Report rep;
  if (opts.command == "analyze") {
    cmd_analyze(cfg, rep);
  } else {
    const auto seed = require_seed(opts, cfg);
    if (opts.command == "tau") cmd_tau(cfg, seed, rep);
    if (opts.command == "poincare") cmd_poincare(cfg, seed, rep);
    if (opts.command == "concentrate") cmd_concentrate(cfg, seed, rep);
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!opts.out_path.empty()) {
    file.open(opts.out_path);
    if (!file) throw ConfigError("cannot write '" + opts.out_path + "'");
    sink = &file;
  }
  if (opts.format == "records") {
    for (const auto& r : rep.records) *sink << r.dump() << "\n";
  } else {
    *sink << rep.table.str();
  }
  if (rep.violated) {
    if (!opts.quiet) err << "certificate violated\n";
    return kViolation;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical certificates for convex concentration on the line"};
  app.require_subcommand(1);
  Options opts;
  app.add_option("--seed", opts.seed, "Seed for randomized commands");
  app.add_option("--out", opts.out_path, "Write the report here instead of stdout");
  app.add_option("--format", opts.format, "table or records")->check(CLI::IsMember({"table", "records"}));
  app.add_flag("--quiet", opts.quiet, "Suppress diagnostics");
  const std::pair<const char*, const char*> commands[] = {
      {"analyze", "Tail ratio, Muckenhoupt constants and the derived C_tau, C_p"},
      {"tau", "Randomized certificate suites for property (tau) and its lemmas"},
      {"poincare", "Convex Poincare lower bound and the cp => membership check"},
      {"concentrate", "Monte Carlo concentration experiments on product measures"},
  };
  for (const auto& [name, about] : commands) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("--config", opts.config_path, "JSON config")->required();
    sub->fallthrough();
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }
  opts.command = app.get_subcommands().front()->get_name();

  auto fail = [&](int code, const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return code;
  };
  try {
    return dispatch(opts, out, err);
  } catch (const ConfigError& e) {
    return fail(kConfig, e);
  } catch (const UnsupportedSet& e) {
    return fail(kConfig, e);
  } catch (const Json::exception& e) {
    return fail(kConfig, e);
  } catch (const InvalidMeasure& e) {
    return fail(kInvalidMeasure, e);
  } catch (const NotSymmetric& e) {
    return fail(kInvalidMeasure, e);
  } catch (const EmptyBase& e) {
    return fail(kDegenerate, e);
  } catch (const NotInClass& e) {
    return fail(kDegenerate, e);
  } catch (const std::invalid_argument& e) {
    return fail(kConfig, e);
  } catch (const std::exception& e) {
    return fail(kInternal, e);
  }
}

}  // namespace cvxtau::cli
