#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvxtau/convexfn.hpp"
#include "cvxtau/infconv.hpp"
#include "cvxtau/measure.hpp"

namespace cvxtau {

/// 17 h / (1 - lambda)^2
double theorem_c_tau(double h, double lambda);
/// C_tau^2 / 2
double theorem_c_p(double c_tau);
/// alpha(C1) = 2 C1 (1 - exp(-1 / (2 C1)))
double alpha(double c1);
/// (1/2) C1 alpha(C1) - 8 / (1 - lambda)^2 at C1 = 17 / (1 - lambda)^2,
/// evaluated with expm1 so that the difference keeps its digits.
double tau_constant_gap(double lambda);

struct TauReport {
  std::string measure_id;
  std::string function_id;
  double c_tau = 0.0;
  /// int e^{f box phi} dmu
  double envelope_integral = 0.0;
  /// int e^{-f} dmu
  double negexp_integral = 0.0;
  double lhs_product = 0.0;
  double margin = 0.0;
  double error_bound = 0.0;
};

/// (int e^{f box phi} dmu)(int e^{-f} dmu) for the cost phi. Throws
/// DivergentIntegral when a factor is infinite.
TauReport tau_functional(const Measure1D& mu, const PLConvex& f, const Cost& cost);

struct TrialRecord {
  int index = 0;
  std::string origin;  // "random" or "hill_climb"
  PLConvex f;
  TauReport report;
  bool divergent = false;
  std::string diagnostic;
  bool violated = false;
};

struct TauSummary {
  std::string measure_id;
  double h = 0.0;
  double lambda_star = 0.0;
  double c_tau = 0.0;
  int trials = 0;
  int violations = 0;
  int divergent = 0;
  double worst_margin = 1.0;
  double max_error_bound = 0.0;
  std::optional<TrialRecord> worst;
  std::vector<TrialRecord> records;

  bool pass() const { return violations == 0; }
};

struct TauSuiteOptions {
  int trials = 200;
  std::uint64_t seed = 0;
  /// Multiplies the theorem constant; 1 reproduces 17 h / (1 - lambda)^2.
  double c_tau_scale = 1.0;
  /// Replaces the theorem constant outright when set.
  std::optional<double> c_tau_override;
  /// Extra evaluations spent hill-climbing from the worst random trial.
  int hill_climb_steps = 200;
  /// Generator for the random functions; bounded_below is forced on. Breakpoint
  /// range defaults to the bulk of mu when left at lo = hi = 0.
  RandomPLOptions generator{.lo = 0.0, .hi = 0.0};
};

/// Random and adversarial check of (a) => (c): every product must stay below
/// 1 + error bound. Requires lambda_star(mu, h) < 1, else NotInClass.
TauSummary certify_a_implies_c(const Measure1D& mu, double h, const TauSuiteOptions& options);

/// A real function with the points where it may fail to be smooth.
struct ScalarFunction {
  std::function<double(double)> fn;
  std::vector<double> kinks;
  std::string id;
};

struct LemmaReport {
  std::string function_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double error_bound = 0.0;
  bool pass = false;
};

/// int g^2 dmu+ <= (2 / (1 - lambda))^2 int (g(x) - g(x - h))^2 dmu+(x),
/// mu+ the normalized restriction of mu to [0, inf). g is read on [0, inf)
/// and extended by 0 to the left. Throws NotInClass when mu+ is not in
/// M+(h, lambda) and std::invalid_argument when g is not a nondecreasing
/// function with g(0) = 0.
LemmaReport certify_lemma_bob(const Measure1D& mu, double h, double lambda, const ScalarFunction& g);

/// int (e^{f/2} - e^{-f/2})^2 dmu <= 8 / (1 - lambda)^2 int e^f (Df)^2 dmu.
/// Requires f(0) = 0; DivergentIntegral when e^f is not mu-integrable.
LemmaReport certify_lemma_bobex(const Measure1D& mu, double h, double lambda, const PLConvex& f);

struct LemmaSuiteSummary {
  int monotone = 0;
  int reflected = 0;
  int non_monotone = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max lhs / rhs
  std::vector<LemmaReport> reports;

  bool pass() const { return violations == 0; }
};

/// Random nondecreasing piecewise-linear g (not necessarily convex), plus
/// convex monotone ones, against certify_lemma_bob.
LemmaSuiteSummary lemma_bob_suite(const Measure1D& mu, double h, double lambda, int trials,
                                  std::uint64_t seed);

/// Monotone, reflected (decreasing) and non-monotone convex f with f(0) = 0.
LemmaSuiteSummary lemma_bobex_suite(const Measure1D& mu, double h, double lambda, int trials,
                                    std::uint64_t seed);

struct VarianceRecord {
  double variance = 0.0;
  double energy = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CImpliesBSummary {
  double c_tau = 0.0;
  double c_p = 0.0;
  int trials = 0;
  int violations = 0;
  double worst_ratio = 0.0;  // max Var / energy
  std::vector<VarianceRecord> records;

  bool pass() const { return violations == 0; }
};

/// Var f <= (C_tau^2 / 2) int (f')^2 dmu + 1e-8 over random convex f.
CImpliesBSummary certify_c_implies_b(const Measure1D& mu, double c_tau, int trials, std::uint64_t seed);

struct ScaleProbeRow {
  double scale = 0.0;
  double c_tau = 0.0;
  int violations = 0;
  double worst_margin = 0.0;
};

/// Reruns the (a) => (c) suite with C_tau multiplied by each factor. Data
/// only; nothing here is asserted.
std::vector<ScaleProbeRow> tau_scale_probe(const Measure1D& mu, double h, std::span<const double> scales,
                                           TauSuiteOptions options);

}  // namespace cvxtau
