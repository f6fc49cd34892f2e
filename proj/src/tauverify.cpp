#include "cvxtau/tauverify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvxtau/errors.hpp"
#include "cvxtau/poincare.hpp"

namespace cvxtau {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double bulk_reach(const Measure1D& mu) { return std::min(mu.tail_quantile(1e-4), 5.0); }

RandomPLOptions with_default_range(RandomPLOptions options, const Measure1D& mu) {
  if (options.lo == 0.0 && options.hi == 0.0) {
    const double reach = bulk_reach(mu);
    options.lo = -1.5 * reach;
    options.hi = 1.5 * reach;
  }
  return options;
}

std::vector<double> with_shifts(const std::vector<double>& points, double h) {
  std::vector<double> out;
  for (double p : points) {
    out.push_back(p);
    out.push_back(p - h);
    out.push_back(p + h);
  }
  return out;
}

// A positive function of slope `slope` at +inf is mu-integrable only when
// the tails decay faster.
void require_decay(const Measure1D& mu, double slope, const char* what) {
  const double rate = mu.tail_decay_rate();
  if (std::isfinite(rate) && mu.support_hi() == kInf && slope >= rate) {
    throw DivergentIntegral(std::string(what) + ": growth rate " + std::to_string(slope) +
                            " is not below the tail decay rate " + std::to_string(rate));
  }
}

std::string describe(const PLConvex& f) {
  std::string out = "plconvex(k=" + std::to_string(f.breakpoints().size()) + ")";
  return out;
}

}  // namespace

double theorem_c_tau(double h, double lambda) {
  if (!(h > 0.0) || !(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("theorem_c_tau needs h > 0 and lambda in [0, 1)");
  }
  return 17.0 * h / ((1.0 - lambda) * (1.0 - lambda));
}

double theorem_c_p(double c_tau) { return 0.5 * c_tau * c_tau; }

double alpha(double c1) { return -2.0 * c1 * std::expm1(-1.0 / (2.0 * c1)); }

double tau_constant_gap(double lambda) {
  const double q = (1.0 - lambda) * (1.0 - lambda);
  const double c1 = 17.0 / q;
  return 0.5 * c1 * alpha(c1) - 8.0 / q;
}

TauReport tau_functional(const Measure1D& mu, const PLConvex& f, const Cost& cost) {
  // The product does not change when a constant is added to f; working with
  // f - inf f keeps both exponentials in range.
  const PLConvex g = f.bounded_below() ? f.plus(-f.infimum()) : f;
  const auto envelope = infconv_exact(g, cost);

  require_decay(mu, envelope.asymptotic_slope_right(), "e^{f box phi}");
  require_decay(mu, -envelope.asymptotic_slope_left(), "e^{f box phi}");
  require_decay(mu, -g.last_slope(), "e^{-f}");
  require_decay(mu, g.first_slope(), "e^{-f}");

  const auto env_kinks = envelope.kinks();
  const Integral i1 = mu.integrate([&](double x) { return std::exp(envelope(x)); }, env_kinks);
  const Integral i2 = mu.integrate([&](double x) { return std::exp(-g(x)); }, g.breakpoints());

  TauReport r;
  r.measure_id = mu.id();
  r.function_id = describe(f);
  r.c_tau = cost.scale();
  r.envelope_integral = i1.value;
  r.negexp_integral = i2.value;
  r.lhs_product = i1.value * i2.value;
  if (!std::isfinite(r.lhs_product)) throw DivergentIntegral("tau product overflowed");
  r.margin = 1.0 - r.lhs_product;
  r.error_bound = i1.error * i2.value + i2.error * i1.value + i1.error * i2.error +
                  64.0 * kEps * r.lhs_product;
  return r;
}

namespace {

struct Evaluated {
  TauReport report;
  bool divergent = false;
  std::string diagnostic;

  double product() const { return divergent ? kInf : report.lhs_product; }
};

Evaluated evaluate(const Measure1D& mu, const PLConvex& f, const Cost& cost) {
  Evaluated out;
  try {
    out.report = tau_functional(mu, f, cost);
  } catch (const DivergentIntegral& e) {
    out.divergent = true;
    out.diagnostic = e.what();
    out.report.measure_id = mu.id();
    out.report.function_id = describe(f);
    out.report.c_tau = cost.scale();
    out.report.lhs_product = kInf;
    out.report.margin = -kInf;
  }
  return out;
}

std::optional<PLConvex> rebuild(std::vector<double> bp, std::vector<double> sl, double anchor_value) {
  std::sort(bp.begin(), bp.end());
  if (std::adjacent_find(bp.begin(), bp.end()) != bp.end()) return std::nullopt;
  std::sort(sl.begin(), sl.end());
  if (sl.front() > 0.0) sl.front() = 0.0;
  if (sl.back() < 0.0) sl.back() = 0.0;
  std::sort(sl.begin(), sl.end());
  return PLConvex(std::move(bp), std::move(sl), 0.0, anchor_value);
}

// Coordinate ascent on breakpoints and slopes maximizing the product.
std::vector<TrialRecord> hill_climb(const Measure1D& mu, const Cost& cost, const TrialRecord& start,
                                    int budget, int first_index) {
  std::vector<TrialRecord> out;
  if (budget <= 0 || start.divergent) return out;
  std::vector<double> bp = start.f.breakpoints();
  std::vector<double> sl = start.f.slopes();
  const double anchor = start.f(0.0);
  double best = start.report.lhs_product;
  TrialRecord best_record = start;

  std::size_t dims = 0;
  double bp_step = 0.25 * (1.0 + bulk_reach(mu));
  double sl_step = 0.5 * cost.lipschitz();
  int used = 0;
  while (used < budget && bp_step > 1e-6) {
    dims = bp.size() + sl.size();
    bool improved = false;
    for (std::size_t d = 0; d < dims && used < budget; ++d) {
      for (double sign : {1.0, -1.0}) {
        if (used >= budget) break;
        auto trial_bp = bp;
        auto trial_sl = sl;
        if (d < bp.size()) {
          trial_bp[d] += sign * bp_step;
        } else {
          trial_sl[d - bp.size()] += sign * sl_step;
        }
        auto candidate = rebuild(trial_bp, trial_sl, anchor);
        if (!candidate) continue;
        ++used;
        auto ev = evaluate(mu, *candidate, cost);
        if (ev.product() > best) {
          best = ev.product();
          bp = candidate->breakpoints();
          sl = candidate->slopes();
          best_record = TrialRecord{first_index + used - 1, "hill_climb", *candidate, ev.report,
                                    ev.divergent, ev.diagnostic, false};
          out.push_back(best_record);
          improved = true;
          if (bp.size() + sl.size() != dims) break;
        }
      }
      if (bp.size() + sl.size() != dims) break;
    }
    if (!improved) {
      bp_step *= 0.5;
      sl_step *= 0.5;
    }
  }
  return out;
}

}  // namespace

TauSummary certify_a_implies_c(const Measure1D& mu, double h, const TauSuiteOptions& options) {
  const auto cert = lambda_star(mu, h);
  if (!(cert.lambda_star < 1.0)) {
    throw NotInClass("lambda_star(h) = 1: measure is in no class M(h, lambda) with lambda < 1");
  }
  TauSummary summary;
  summary.measure_id = mu.id();
  summary.h = h;
  summary.lambda_star = cert.lambda_star;
  summary.c_tau = options.c_tau_override ? *options.c_tau_override
                                         : options.c_tau_scale * theorem_c_tau(h, cert.lambda_star);
  const Cost cost(summary.c_tau);

  auto account = [&](TrialRecord rec) {
    rec.violated = rec.divergent || rec.report.lhs_product > 1.0 + rec.report.error_bound;
    ++summary.trials;
    if (rec.divergent) ++summary.divergent;
    if (rec.violated) ++summary.violations;
    summary.max_error_bound = std::max(summary.max_error_bound, rec.report.error_bound);
    if (!summary.worst || rec.report.margin < summary.worst_margin) {
      summary.worst_margin = rec.report.margin;
      summary.worst = rec;
    }
    summary.records.push_back(std::move(rec));
  };

  Rng rng(options.seed);
  auto generator = with_default_range(options.generator, mu);
  generator.bounded_below = true;
  for (int i = 0; i < options.trials; ++i) {
    auto f = random_plconvex(rng, generator);
    auto ev = evaluate(mu, f, cost);
    account({i, "random", std::move(f), ev.report, ev.divergent, ev.diagnostic, false});
  }
  // Climb from the worst trial with a finite product.
  const TrialRecord* start_ptr = nullptr;
  for (const auto& rec : summary.records) {
    if (!rec.divergent && (!start_ptr || rec.report.margin < start_ptr->report.margin)) start_ptr = &rec;
  }
  if (start_ptr && options.hill_climb_steps > 0) {
    const TrialRecord start = *start_ptr;
    for (auto& rec : hill_climb(mu, cost, start, options.hill_climb_steps, options.trials)) {
      account(std::move(rec));
    }
  }
  return summary;
}

LemmaReport certify_lemma_bob(const Measure1D& mu, double h, double lambda, const ScalarFunction& g) {
  if (!(h > 0.0)) throw std::invalid_argument("lemma bob: h must be positive");
  const double mass = mu.tail(0.0);
  if (!(mass > 0.0)) throw NotInClass("mu has no mass on [0, inf)");
  const auto cert = tail_ratio_sup(mu, h);
  if (cert.lambda_star > lambda + 1e-12) {
    throw NotInClass("tail ratio " + std::to_string(cert.lambda_star) + " at x = " +
                     std::to_string(cert.witness) + " exceeds lambda = " + std::to_string(lambda));
  }

  if (std::abs(g.fn(0.0)) > 1e-12) throw std::invalid_argument("lemma bob: g(0) must be 0");
  std::vector<double> probes = g.kinks;
  const double top = std::max(mu.tail_quantile(1e-8), 1.0);
  for (int i = 0; i <= 512; ++i) probes.push_back(top * i / 512.0);
  std::sort(probes.begin(), probes.end());
  double prev = 0.0;
  for (double x : probes) {
    if (x < 0.0) continue;
    const double v = g.fn(x);
    if (v < -1e-12 || v < prev - 1e-12 * (1.0 + std::abs(prev))) {
      throw std::invalid_argument("lemma bob: g must be nonnegative and nondecreasing on [0, inf)");
    }
    prev = v;
  }

  auto ext = [&](double x) { return x <= 0.0 ? 0.0 : g.fn(x); };
  auto kinks = with_shifts(g.kinks, h);
  kinks.push_back(0.0);
  kinks.push_back(h);
  const Integral lhs = mu.integrate(
      [&](double x) {
        const double v = x < 0.0 ? 0.0 : ext(x);
        return v * v;
      },
      kinks);
  const Integral diff = mu.integrate(
      [&](double x) {
        if (x < 0.0) return 0.0;
        const double d = ext(x) - ext(x - h);
        return d * d;
      },
      kinks);

  const double factor = 4.0 / ((1.0 - lambda) * (1.0 - lambda));
  LemmaReport r;
  r.function_id = g.id;
  r.lhs = lhs.value / mass;
  r.rhs = factor * diff.value / mass;
  r.error_bound = (lhs.error + factor * diff.error) / mass;
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-8) + r.error_bound;
  return r;
}

LemmaReport certify_lemma_bobex(const Measure1D& mu, double h, double lambda, const PLConvex& f) {
  if (std::abs(f(0.0)) > 1e-12) throw std::invalid_argument("lemma bobex: f(0) must be 0");
  const auto cert = lambda_star(mu, h);
  if (cert.lambda_star > lambda + 1e-12) {
    throw NotInClass("lambda_star " + std::to_string(cert.lambda_star) + " exceeds lambda = " +
                     std::to_string(lambda));
  }
  require_decay(mu, f.max_abs_slope(), "e^{|f|}");

  const auto df = discrete_gradient(f, h);
  const Integral lhs = mu.integrate(
      [&](double x) {
        const double s = 2.0 * std::sinh(0.5 * f(x));
        return s * s;
      },
      f.breakpoints());
  const Integral rhs = mu.integrate(
      [&](double x) {
        const double d = df(x);
        return std::exp(f(x)) * d * d;
      },
      df.kinks());

  const double factor = 8.0 / ((1.0 - lambda) * (1.0 - lambda));
  LemmaReport r;
  r.function_id = describe(f);
  r.lhs = lhs.value;
  r.rhs = factor * rhs.value;
  r.error_bound = lhs.error + factor * rhs.error;
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-8) + r.error_bound;
  return r;
}

namespace {

void tally(LemmaSuiteSummary& summary, LemmaReport report) {
  if (!report.pass) ++summary.violations;
  if (report.rhs > 0.0) summary.worst_ratio = std::max(summary.worst_ratio, report.lhs / report.rhs);
  summary.reports.push_back(std::move(report));
}

}  // namespace

LemmaSuiteSummary lemma_bob_suite(const Measure1D& mu, double h, double lambda, int trials,
                                  std::uint64_t seed) {
  LemmaSuiteSummary summary;
  Rng rng(seed);
  const double reach = 1.5 * bulk_reach(mu);
  for (int i = 0; i < trials; ++i) {
    const int k = 1 + static_cast<int>(uniform_open(rng) * 6);
    std::vector<double> bp;
    for (int j = 0; j < k; ++j) bp.push_back(uniform_in(rng, 0.0, reach));
    std::sort(bp.begin(), bp.end());
    bp.insert(bp.begin(), 0.0);
    std::vector<double> sl;
    const double scale = std::exp(uniform_in(rng, std::log(1e-2), std::log(10.0)));
    for (std::size_t j = 0; j < bp.size(); ++j) sl.push_back(scale * std::abs(standard_normal(rng)));
    // Every third function is a sparse ramp: most slopes switched off.
    if (i % 3 == 2) {
      for (std::size_t j = 0; j + 1 < sl.size(); ++j) {
        if (uniform_open(rng) < 0.6) sl[j] = 0.0;
      }
    }
    std::vector<double> vals{0.0};
    for (std::size_t j = 1; j < bp.size(); ++j) vals.push_back(vals.back() + sl[j - 1] * (bp[j] - bp[j - 1]));
    ScalarFunction g{[bp, sl, vals](double x) {
                       if (x <= 0.0) return 0.0;
                       const auto idx = static_cast<std::size_t>(
                           std::upper_bound(bp.begin(), bp.end(), x) - bp.begin() - 1);
                       return vals[idx] + sl[idx] * (x - bp[idx]);
                     },
                     bp, "ramp#" + std::to_string(i)};
    ++summary.monotone;
    tally(summary, certify_lemma_bob(mu, h, lambda, g));
  }
  return summary;
}

LemmaSuiteSummary lemma_bobex_suite(const Measure1D& mu, double h, double lambda, int trials,
                                    std::uint64_t seed) {
  LemmaSuiteSummary summary;
  Rng rng(seed);
  RandomPLOptions options = with_default_range({.lo = 0.0, .hi = 0.0}, mu);
  options.zero_at_origin = true;
  options.max_abs_slope = std::min(10.0, 0.45 * mu.tail_decay_rate());
  for (int i = 0; i < trials; ++i) {
    const int family = i % 3;
    options.bounded_below = family == 2;
    PLConvex f = random_plconvex(rng, options);
    if (family < 2) {
      std::vector<double> sl = f.slopes();
      for (auto& s : sl) s = std::abs(s);
      std::sort(sl.begin(), sl.end());
      f = PLConvex(f.breakpoints(), std::move(sl), 0.0, 0.0);
      if (family == 1) f = f.reflected();
    }
    if (family == 0) ++summary.monotone;
    if (family == 1) ++summary.reflected;
    if (family == 2) ++summary.non_monotone;
    tally(summary, certify_lemma_bobex(mu, h, lambda, f));
  }
  return summary;
}

CImpliesBSummary certify_c_implies_b(const Measure1D& mu, double c_tau, int trials, std::uint64_t seed) {
  CImpliesBSummary summary;
  summary.c_tau = c_tau;
  summary.c_p = theorem_c_p(c_tau);
  Rng rng(seed);
  const auto options = with_default_range({.lo = 0.0, .hi = 0.0}, mu);
  for (int i = 0; i < trials; ++i) {
    const auto f = random_plconvex(rng, options);
    VarianceRecord rec;
    rec.variance = variance(mu, f);
    rec.energy = dirichlet_energy(mu, f);
    rec.bound = summary.c_p * rec.energy;
    rec.pass = rec.variance <= rec.bound + 1e-8;
    ++summary.trials;
    if (!rec.pass) ++summary.violations;
    if (rec.energy > 0.0) summary.worst_ratio = std::max(summary.worst_ratio, rec.variance / rec.energy);
    summary.records.push_back(rec);
  }
  return summary;
}

std::vector<ScaleProbeRow> tau_scale_probe(const Measure1D& mu, double h, std::span<const double> scales,
                                           TauSuiteOptions options) {
  std::vector<ScaleProbeRow> rows;
  options.c_tau_override.reset();
  for (double s : scales) {
    options.c_tau_scale = s;
    const auto summary = certify_a_implies_c(mu, h, options);
    rows.push_back({s, summary.c_tau, summary.violations, summary.worst_margin});
  }
  return rows;
}

}  // namespace cvxtau
