#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "cvxtau/convexfn.hpp"

namespace cvxtau {

/// Huber-type cost phi(x) = weight * phi0(x / scale) with
/// phi0(x) = x^2 / 2 for |x| <= 1 and |x| - 1/2 beyond.
///
/// The property-(tau) cost is Cost(C_tau); the auxiliary cost of the
/// infimum-convolution estimate is Cost(h, 1 / C1).
class Cost {
 public:
  explicit Cost(double scale, double weight = 1.0);

  static double phi0(double x);

  double operator()(double x) const { return weight_ * phi0(x / scale_); }
  double derivative(double x) const;

  double scale() const { return scale_; }
  double weight() const { return weight_; }
  /// Global Lipschitz constant weight / scale.
  double lipschitz() const { return weight_ / scale_; }
  /// phi = (x^2 / (2 t)) box (L |x|) with t = scale^2 / weight.
  double moreau_parameter() const { return scale_ * scale_ / weight_; }

 private:
  double scale_;
  double weight_;
};

/// One piece of an envelope: c0 + c1 (x - origin) + c2 (x - origin)^2 on
/// [lo, hi], together with the affine minimizer map y(x) = prox_slope x + prox_offset.
struct EnvelopePiece {
  double lo;
  double hi;
  double origin;
  std::array<double, 3> coeffs;
  double prox_slope;
  double prox_offset;

  double value(double x) const {
    const double d = x - origin;
    return coeffs[0] + d * (coeffs[1] + d * coeffs[2]);
  }
  double slope(double x) const { return coeffs[1] + 2.0 * coeffs[2] * (x - origin); }
};

/// Convex piecewise affine/quadratic function, the exact value of f box phi.
class EnvelopeFunction {
 public:
  explicit EnvelopeFunction(std::vector<EnvelopePiece> pieces);

  double operator()(double x) const { return piece_at(x).value(x); }
  double right_slope(double x) const;
  double left_slope(double x) const;
  /// A minimizing y of f(y) + phi(x - y); nondecreasing in x.
  double minimizer_at(double x) const;

  const std::vector<EnvelopePiece>& pieces() const { return pieces_; }
  /// Finite piece boundaries.
  std::vector<double> kinks() const;
  double asymptotic_slope_left() const { return pieces_.front().coeffs[1]; }
  double asymptotic_slope_right() const { return pieces_.back().coeffs[1]; }

 private:
  const EnvelopePiece& piece_at(double x) const;
  std::vector<EnvelopePiece> pieces_;
  std::vector<double> starts_;
};

/// Exact f box phi via the envelope decomposition: Moreau envelope with
/// parameter t followed by Lipschitz regularization at level L. Throws
/// UnboundedBelow when the infimum convolution is identically -inf.
EnvelopeFunction infconv_exact(const PLConvex& f, const Cost& cost);

struct UniformGrid {
  double start;
  double step;
  Eigen::Index size;

  double at(Eigen::Index i) const { return start + step * static_cast<double>(i); }
  static UniformGrid symmetric(double half_width, double step);
};

enum class SweepMethod { TwoPointer, DivideAndConquer };

struct GridInfConv {
  Eigen::VectorXd values;
  std::vector<Eigen::Index> argmin;
  SweepMethod method;
};

/// Exact discrete inf-convolution min_j f_j + phi(x_i - x_j). Convex input
/// uses a linear two-pointer sweep; other input falls back to the
/// divide-and-conquer monotone-minima scheme (valid because phi is convex).
GridInfConv infconv_grid(const Eigen::Ref<const Eigen::VectorXd>& f_values, const Cost& cost,
                         const UniformGrid& grid);

/// Default probe points: [-x_max, x_max] with x_max = max(20, 5 C), step
/// `step`, refined tenfold within 10 steps of each breakpoint.
std::vector<double> default_probe_grid(const PLConvex& f, double cost_scale, double step = 1e-3);

struct LemmaBoundReport {
  double max_violation = 0.0;
  double worst_x = 0.0;
  std::size_t probes = 0;
};

/// Checks (f box phi1)(x) <= f(x) - (C1 / 2) (Df)(x)^2 with
/// phi1 = phi0(. / h) / C1 on the probes. Requires |f'| <= 1 / (C1 h).
LemmaBoundReport lemma_bound_certificate(const PLConvex& f, double c1, double h,
                                         std::span<const double> probes);

}  // namespace cvxtau
