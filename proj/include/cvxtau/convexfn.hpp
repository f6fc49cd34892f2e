#pragma once

#include <limits>
#include <vector>

#include "cvxtau/stats.hpp"

namespace cvxtau {

/// Piecewise-linear convex function on the real line.
///
/// Stored as strictly increasing breakpoints b_1 < ... < b_k, slopes
/// s_0 <= s_1 <= ... <= s_k (s_i is the slope right of b_i) and the value at
/// one anchor point. Equal adjacent slopes are merged on construction.
class PLConvex {
 public:
  PLConvex(std::vector<double> breakpoints, std::vector<double> slopes, double anchor_x,
           double anchor_value);

  /// slope * x + intercept
  static PLConvex affine(double slope, double intercept = 0.0);
  /// scale * |x - center|
  static PLConvex abs(double scale = 1.0, double center = 0.0);
  /// max{x - u, 0}
  static PLConvex hinge(double u);
  static PLConvex constant(double c) { return affine(0.0, c); }

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  /// The limsup of difference quotients, i.e. the right derivative.
  double right_slope(double x) const;
  double left_slope(double x) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& slopes() const { return slopes_; }
  double first_slope() const { return slopes_.front(); }
  double last_slope() const { return slopes_.back(); }
  double max_abs_slope() const;

  bool bounded_below() const { return first_slope() <= 0.0 && last_slope() >= 0.0; }
  /// inf f, or -inf when unbounded below.
  double infimum() const;

  /// Closed interval of minimizers with +-inf ends; for strictly monotone f
  /// the set is empty and both ends carry the same infinite sentinel.
  struct MinimizingSet {
    double left;
    double right;
  };
  MinimizingSet minimizing_set() const;
  /// Left end of the minimizing set; -inf for nondecreasing f that never
  /// turns, +inf for decreasing f.
  double minimizer() const { return minimizing_set().left; }

  PLConvex plus(double c) const;
  /// x -> f(-x)
  PLConvex reflected() const;
  /// x -> s * f(x), s >= 0
  PLConvex scaled(double s) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
  std::vector<double> values_;  // f at each breakpoint
  double anchor_x_;
  double anchor_value_;
};

enum class MinimizerChoice { Left, Right };

/// Three-branch step-h difference of a convex function around its minimizer:
///   f(x) - f(x - h)   for x > x0 + h
///   f(x) - f(x0)      for x in [x0 - h, x0 + h]
///   f(x) - f(x + h)   for x < x0 - h
class DiscreteGradient {
 public:
  DiscreteGradient(PLConvex f, double h, MinimizerChoice choice = MinimizerChoice::Left);

  double operator()(double x) const;
  double h() const { return h_; }
  double x0() const { return x0_; }
  /// Points where Df may fail to be affine.
  std::vector<double> kinks() const;

 private:
  PLConvex f_;
  double h_;
  double x0_;
  double f_x0_;
};

DiscreteGradient discrete_gradient(const PLConvex& f, double h,
                                   MinimizerChoice choice = MinimizerChoice::Left);

/// Slope truncation g with |g'| <= bound, g <= f, and g = f on [clip_lo, clip_hi].
struct SlopeTruncation {
  PLConvex g;
  double clip_lo;
  double clip_hi;
};

SlopeTruncation truncate_slopes(const PLConvex& f, double bound);

struct RandomPLOptions {
  int min_breakpoints = 1;
  int max_breakpoints = 12;
  double lo = -5.0;
  double hi = 5.0;
  /// Slopes are sorted N(0, scale^2) draws; scale is log-uniform in this range.
  double slope_scale_min = 1e-2;
  double slope_scale_max = 10.0;
  double anchor_range = 1.0;
  bool bounded_below = false;
  /// Rescale so that max |slope| stays at or below this cap.
  double max_abs_slope = std::numeric_limits<double>::infinity();
  /// Snap breakpoints to multiples of this step when positive.
  double quantum = 0.0;
  /// Force f(0) = 0.
  bool zero_at_origin = false;
};

PLConvex random_plconvex(Rng& rng, const RandomPLOptions& options = {});

}  // namespace cvxtau
