#include "cvxtau/convexfn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvxtau/errors.hpp"
#include "cvxtau/numeric.hpp"

namespace cvxtau {

PLConvex::PLConvex(std::vector<double> breakpoints, std::vector<double> slopes, double anchor_x,
                   double anchor_value) {
  if (slopes.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("PLConvex: need exactly one more slope than breakpoints");
  }
  if (!std::isfinite(anchor_x) || !std::isfinite(anchor_value)) {
    throw std::invalid_argument("PLConvex: anchor must be finite");
  }
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    if (!std::isfinite(slopes[i])) throw std::invalid_argument("PLConvex: slopes must be finite");
    if (i > 0 && slopes[i] < slopes[i - 1]) {
      throw std::invalid_argument("PLConvex: slopes must be nondecreasing");
    }
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))) {
      throw std::invalid_argument("PLConvex: breakpoints must be finite and strictly increasing");
    }
  }

  slopes_.push_back(slopes.front());
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (slopes[i + 1] == slopes_.back()) continue;
    breakpoints_.push_back(breakpoints[i]);
    slopes_.push_back(slopes[i + 1]);
  }

  // Values at breakpoints, integrating slopes outward from the anchor piece.
  const std::size_t k = breakpoints_.size();
  values_.assign(k, 0.0);
  if (k > 0) {
    // The anchor lies on piece idx, between breakpoints idx-1 and idx.
    const auto idx = static_cast<std::ptrdiff_t>(
        std::upper_bound(breakpoints_.begin(), breakpoints_.end(), anchor_x) - breakpoints_.begin());
    const auto kk = static_cast<std::ptrdiff_t>(k);
    const auto& b = breakpoints_;
    const auto& s = slopes_;
    if (idx < kk) values_[idx] = anchor_value + s[idx] * (b[idx] - anchor_x);
    if (idx > 0) values_[idx - 1] = anchor_value - s[idx] * (anchor_x - b[idx - 1]);
    for (std::ptrdiff_t j = idx + 1; j < kk; ++j) values_[j] = values_[j - 1] + s[j] * (b[j] - b[j - 1]);
    for (std::ptrdiff_t j = idx - 2; j >= 0; --j) values_[j] = values_[j + 1] - s[j + 1] * (b[j + 1] - b[j]);
    anchor_x_ = breakpoints_.front();
    anchor_value_ = values_.front();
  } else {
    anchor_x_ = anchor_x;
    anchor_value_ = anchor_value;
  }
}

PLConvex PLConvex::affine(double slope, double intercept) { return PLConvex({}, {slope}, 0.0, intercept); }

PLConvex PLConvex::abs(double scale, double center) {
  return PLConvex({center}, {-scale, scale}, center, 0.0);
}

PLConvex PLConvex::hinge(double u) { return PLConvex({u}, {0.0, 1.0}, u, 0.0); }

double PLConvex::eval(double x) const {
  if (breakpoints_.empty()) return anchor_value_ + slopes_[0] * (x - anchor_x_);
  const auto idx = static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
  if (idx == 0) return values_[0] + slopes_[0] * (x - breakpoints_[0]);
  return values_[idx - 1] + slopes_[idx] * (x - breakpoints_[idx - 1]);
}

double PLConvex::right_slope(double x) const {
  const auto idx = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
  return slopes_[static_cast<std::size_t>(idx)];
}

double PLConvex::left_slope(double x) const {
  const auto idx = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
  return slopes_[static_cast<std::size_t>(idx)];
}

double PLConvex::max_abs_slope() const {
  return std::max(std::abs(slopes_.front()), std::abs(slopes_.back()));
}

double PLConvex::infimum() const {
  if (!bounded_below()) return -kInf;
  const auto set = minimizing_set();
  if (std::isfinite(set.left)) return eval(set.left);
  if (std::isfinite(set.right)) return eval(set.right);
  return anchor_value_;  // constant function
}

PLConvex::MinimizingSet PLConvex::minimizing_set() const {
  const std::size_t n = slopes_.size();
  if (slopes_.front() > 0.0) return {-kInf, -kInf};
  if (slopes_.back() < 0.0) return {kInf, kInf};
  // First piece with slope >= 0 and last piece with slope <= 0.
  std::size_t first_nonneg = 0;
  while (slopes_[first_nonneg] < 0.0) ++first_nonneg;
  std::size_t last_nonpos = n - 1;
  while (slopes_[last_nonpos] > 0.0) --last_nonpos;
  const double left = first_nonneg == 0 ? -kInf : breakpoints_[first_nonneg - 1];
  const double right = last_nonpos == n - 1 ? kInf : breakpoints_[last_nonpos];
  return {left, right};
}

PLConvex PLConvex::plus(double c) const {
  PLConvex out = *this;
  for (auto& v : out.values_) v += c;
  out.anchor_value_ += c;
  return out;
}

PLConvex PLConvex::reflected() const {
  std::vector<double> bp(breakpoints_.rbegin(), breakpoints_.rend());
  for (auto& b : bp) b = -b;
  std::vector<double> sl(slopes_.rbegin(), slopes_.rend());
  for (auto& s : sl) s = -s;
  return PLConvex(std::move(bp), std::move(sl), -anchor_x_, anchor_value_);
}

PLConvex PLConvex::scaled(double s) const {
  if (!(s >= 0.0)) throw std::invalid_argument("PLConvex::scaled needs s >= 0");
  std::vector<double> sl = slopes_;
  for (auto& v : sl) v *= s;
  return PLConvex(breakpoints_, std::move(sl), anchor_x_, s * anchor_value_);
}

DiscreteGradient::DiscreteGradient(PLConvex f, double h, MinimizerChoice choice)
    : f_(std::move(f)), h_(h) {
  if (!(h > 0.0)) throw std::invalid_argument("discrete gradient needs h > 0");
  const auto set = f_.minimizing_set();
  x0_ = choice == MinimizerChoice::Left ? set.left : set.right;
  // A flat-bottomed f with an unbounded minimizing set still has a finite
  // end on the other side; the sentinel only arises for the matching side.
  f_x0_ = std::isfinite(x0_) ? f_(x0_) : 0.0;
}

double DiscreteGradient::operator()(double x) const {
  if (x > x0_ + h_) return f_(x) - f_(x - h_);
  if (x < x0_ - h_) return f_(x) - f_(x + h_);
  return f_(x) - f_x0_;
}

std::vector<double> DiscreteGradient::kinks() const {
  std::vector<double> out;
  for (double b : f_.breakpoints()) {
    out.push_back(b);
    out.push_back(b - h_);
    out.push_back(b + h_);
  }
  if (std::isfinite(x0_)) {
    out.push_back(x0_ - h_);
    out.push_back(x0_ + h_);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DiscreteGradient discrete_gradient(const PLConvex& f, double h, MinimizerChoice choice) {
  return DiscreteGradient(f, h, choice);
}

SlopeTruncation truncate_slopes(const PLConvex& f, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("truncate_slopes: bound must be positive");
  const auto& bp = f.breakpoints();
  const auto& sl = f.slopes();
  const std::size_t n = sl.size();

  // Pieces with |slope| <= bound form a contiguous run [first, last].
  std::size_t first = 0;
  while (first < n && sl[first] < -bound) ++first;
  std::size_t last = n;
  while (last > 0 && sl[last - 1] > bound) --last;

  double anchor;
  double clip_lo;
  double clip_hi;
  if (first < last) {
    clip_lo = first == 0 ? -kInf : bp[first - 1];
    clip_hi = last == n ? kInf : bp[last - 1];
    anchor = std::isfinite(clip_lo) ? clip_lo : (std::isfinite(clip_hi) ? clip_hi : 0.0);
  } else if (first == last && first > 0 && first < n) {
    // Slope jumps over [-bound, bound] at a kink, which is the minimizer.
    anchor = bp[first - 1];
    clip_lo = clip_hi = anchor;
  } else {
    throw Unbounded("truncate_slopes: every slope lies beyond the bound on one side");
  }

  std::vector<double> clipped(sl);
  for (auto& s : clipped) s = std::clamp(s, -bound, bound);
  return {PLConvex(bp, std::move(clipped), anchor, f(anchor)), clip_lo, clip_hi};
}

PLConvex random_plconvex(Rng& rng, const RandomPLOptions& options) {
  const int span = options.max_breakpoints - options.min_breakpoints + 1;
  const int k = options.min_breakpoints + static_cast<int>(uniform_open(rng) * span);
  std::vector<double> bp;
  for (int i = 0; i < k; ++i) {
    double b = uniform_in(rng, options.lo, options.hi);
    if (options.quantum > 0.0) b = std::round(b / options.quantum) * options.quantum;
    bp.push_back(b);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  const double log_lo = std::log(options.slope_scale_min);
  const double log_hi = std::log(options.slope_scale_max);
  const double scale = std::exp(uniform_in(rng, log_lo, log_hi));
  std::vector<double> sl(bp.size() + 1);
  for (auto& s : sl) s = scale * standard_normal(rng);
  std::sort(sl.begin(), sl.end());
  if (options.bounded_below) {
    if (sl.front() > 0.0) sl.front() = -sl.front();
    if (sl.back() < 0.0) sl.back() = -sl.back();
  }
  double biggest = 0.0;
  for (double s : sl) biggest = std::max(biggest, std::abs(s));
  if (biggest > options.max_abs_slope) {
    const double shrink = options.max_abs_slope / biggest;
    for (auto& s : sl) s *= shrink;
  }
  const double anchor_value =
      options.zero_at_origin ? 0.0 : uniform_in(rng, -options.anchor_range, options.anchor_range);
  return PLConvex(std::move(bp), std::move(sl), 0.0, anchor_value);
}

}  // namespace cvxtau
