#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cvxtau/convexfn.hpp"
#include "cvxtau/measure.hpp"

namespace cvxtau {

struct ProductMeasure {
  std::vector<Measure1D> factors;

  static ProductMeasure iid(const Measure1D& mu, int n) {
    return {std::vector<Measure1D>(static_cast<std::size_t>(n), mu)};
  }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(factors.size()); }
};

/// count x n matrix, one sample per row, coordinates drawn by inverse CDF in
/// row-major order from a single seeded stream.
Eigen::MatrixXd sample(const ProductMeasure& pm, Eigen::Index count, std::uint64_t seed);

/// {x : <a, x> <= c}
struct HalfSpace {
  Eigen::VectorXd a;
  double c;
};
/// {x : |<a, x>| <= c}
struct Slab {
  Eigen::VectorXd a;
  double c;
};
struct L2Ball {
  Eigen::VectorXd center;
  double radius;
};
struct L1Ball {
  Eigen::VectorXd center;
  double radius;
};

using ConvexSet = std::variant<HalfSpace, Slab, L2Ball, L1Ball>;

std::string family(const ConvexSet& set);
bool contains(const ConvexSet& set, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Euclidean distance from z to the l1 ball of the given radius.
double distance_to_l1_ball(const Eigen::Ref<const Eigen::VectorXd>& z, double radius);

/// Exact test for x in A + s B2 + r B1.
bool enlargement_member(const ConvexSet& set, const Eigen::Ref<const Eigen::VectorXd>& x, double s,
                        double r);

/// Support function of B_phi(t) = {y : sum phi0(y_i / C) <= t} in direction a.
double cost_ball_support(const Eigen::Ref<const Eigen::VectorXd>& a, double c_tau, double t);

struct ConcentrationRow {
  double t = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double radius = 0.0;
  bool pass = false;
};

struct ConcentrationReport {
  std::string experiment;
  std::string set_family;
  /// False when the enlargement was tested through a superset.
  bool exact = true;
  double c_tau = 0.0;
  Eigen::Index samples = 0;
  double base_probability = 0.0;
  std::vector<ConcentrationRow> rows;

  bool pass() const;
};

/// Confidence level of every Monte Carlo interval before Bonferroni splitting.
inline constexpr double kConfidence = 0.999;

/// mu(A + sqrt(2t) C B2 + 2t C B1) >= 1 - e^{-t} / mu(A), C = 17 h / (1 - lambda)^2.
/// Throws NotInClass when a factor is outside M(h, lambda) and EmptyBase when
/// no sample lands in A.
ConcentrationReport verify_corr1(const ProductMeasure& pm, const ConvexSet& set, double h, double lambda,
                                 std::span<const double> t_grid, Eigen::Index samples, std::uint64_t seed);

/// mu(A + B_phi(t)) >= 1 - e^{-t} / mu(A). Exact for half-spaces and slabs;
/// balls are tested through the corr1 superset and flagged inexact.
ConcentrationReport verify_gencon(const ProductMeasure& pm, const ConvexSet& set, double c_tau,
                                  std::span<const double> t_grid, Eigen::Index samples, std::uint64_t seed);

/// <w, x>
struct LinearFunction {
  Eigen::VectorXd w;
};
/// max_i x_i
struct MaxCoordinate {};
/// g(<w, x>) for a fixed convex g
struct PLOfLinear {
  PLConvex g;
  Eigen::VectorXd w;
};

using LipschitzFunction = std::variant<LinearFunction, MaxCoordinate, PLOfLinear>;

std::string family(const LipschitzFunction& f);
/// Values of f on every sample row.
Eigen::VectorXd evaluate_rows(const LipschitzFunction& f, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// 2 exp(-min{t / b, t^2 / a^2} / 8)
double corr2_bound(double t, double a, double b);

/// min{r / b, r^2 / a^2} / 8 <= t for r = a sqrt(2t) + 2bt, within tol.
bool corr2_exponent_consistent(double a, double b, double t, double tol = 1e-12);

struct Corr2Row {
  double t = 0.0;
  double upper_empirical = 0.0;
  double upper_radius = 0.0;
  bool upper_pass = false;
  double lower_empirical = 0.0;
  double lower_radius = 0.0;
  bool lower_pass = false;
  double bound = 0.0;
};

struct Corr2Report {
  std::string function_family;
  double c_tau = 0.0;
  double a = 0.0;
  double b = 0.0;
  Eigen::Index samples = 0;
  double median = 0.0;
  double median_lo = 0.0;
  double median_hi = 0.0;
  std::vector<Corr2Row> rows;

  bool pass() const;
};

/// Both one-sided deviations of f from its median at distance C t against
/// 2 exp(-min{t / b, t^2 / a^2} / 8).
Corr2Report verify_corr2(const ProductMeasure& pm, const LipschitzFunction& f, double a, double b, double h,
                         double lambda, std::span<const double> t_grid, Eigen::Index samples,
                         std::uint64_t seed);

}  // namespace cvxtau
