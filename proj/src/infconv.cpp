#include "cvxtau/infconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cvxtau/errors.hpp"
#include "cvxtau/numeric.hpp"

namespace cvxtau {
namespace {

// Moreau envelope of a PL convex f with parameter t: affine pieces
// (slope s_i, minimizer x - t s_i) alternating with quadratics centred on the
// breakpoints (minimizer pinned at the breakpoint).
std::vector<EnvelopePiece> moreau_envelope(const PLConvex& f, double t) {
  const auto& b = f.breakpoints();
  const auto& s = f.slopes();
  const std::size_t k = b.size();
  std::vector<EnvelopePiece> out;
  out.reserve(2 * k + 1);
  for (std::size_t i = 0; i <= k; ++i) {
    const double lo = i == 0 ? -kInf : b[i - 1] + t * s[i];
    const double hi = i == k ? kInf : b[i] + t * s[i];
    const double origin = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    const double value = f(origin - t * s[i]) + 0.5 * t * s[i] * s[i];
    out.push_back({lo, hi, origin, {value, s[i], 0.0}, 1.0, -t * s[i]});
    if (i < k) {
      const double bp = b[i];
      out.push_back({bp + t * s[i], bp + t * s[i + 1], bp, {f(bp), 0.0, 0.5 / t}, 0.0, bp});
    }
  }
  return out;
}

}  // namespace

Cost::Cost(double scale, double weight) : scale_(scale), weight_(weight) {
  if (!(scale > 0.0) || !(weight > 0.0) || !std::isfinite(scale) || !std::isfinite(weight)) {
    throw std::invalid_argument("Cost: scale and weight must be positive and finite");
  }
}

double Cost::phi0(double x) {
  const double a = std::abs(x);
  return a <= 1.0 ? 0.5 * x * x : a - 0.5;
}

double Cost::derivative(double x) const {
  return weight_ / scale_ * std::clamp(x / scale_, -1.0, 1.0);
}

EnvelopeFunction::EnvelopeFunction(std::vector<EnvelopePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("EnvelopeFunction needs at least one piece");
  starts_.reserve(pieces_.size());
  for (const auto& p : pieces_) starts_.push_back(p.lo);
}

const EnvelopePiece& EnvelopeFunction::piece_at(double x) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), x);
  const auto idx = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
  return pieces_[idx];
}

double EnvelopeFunction::right_slope(double x) const { return piece_at(x).slope(x); }

double EnvelopeFunction::left_slope(double x) const {
  auto it = std::lower_bound(starts_.begin(), starts_.end(), x);
  const auto idx = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
  return pieces_[idx].slope(x);
}

double EnvelopeFunction::minimizer_at(double x) const {
  const auto& p = piece_at(x);
  return p.prox_slope * x + p.prox_offset;
}

std::vector<double> EnvelopeFunction::kinks() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < pieces_.size(); ++i) out.push_back(pieces_[i].lo);
  return out;
}

EnvelopeFunction infconv_exact(const PLConvex& f, const Cost& cost) {
  const double t = cost.moreau_parameter();
  const double lip = cost.lipschitz();
  if (f.first_slope() > lip || f.last_slope() < -lip) {
    throw UnboundedBelow("f box phi is -inf: f decreases faster than phi grows");
  }
  const auto moreau = moreau_envelope(f, t);
  const auto& b = f.breakpoints();
  const auto& s = f.slopes();

  // The Moreau envelope is C^1 with derivative running from s_0 to s_k; clip
  // it where the derivative leaves [-L, L].
  double x_lo = -kInf;
  double x_hi = kInf;
  for (std::size_t j = 1; j < s.size(); ++j) {
    if (s[j - 1] < -lip && s[j] >= -lip) x_lo = b[j - 1] - t * lip;
    if (s[j - 1] <= lip && s[j] > lip) x_hi = b[j - 1] + t * lip;
  }

  auto moreau_piece = [&](double x) -> const EnvelopePiece& {
    for (const auto& p : moreau)
      if (x >= p.lo && x <= p.hi) return p;
    return moreau.back();
  };

  std::vector<EnvelopePiece> pieces;
  if (std::isfinite(x_lo)) {
    const auto& p = moreau_piece(x_lo);
    pieces.push_back({-kInf, x_lo, x_lo, {p.value(x_lo), -lip, 0.0}, 0.0,
                      p.prox_slope * x_lo + p.prox_offset});
  }
  for (const auto& p : moreau) {
    const double lo = std::max(p.lo, x_lo);
    const double hi = std::min(p.hi, x_hi);
    if (!(hi > lo)) continue;
    EnvelopePiece q = p;
    q.lo = lo;
    q.hi = hi;
    if (!std::isfinite(q.origin) || q.origin < lo || q.origin > hi) {
      const double origin = std::isfinite(lo) ? lo : hi;
      q.coeffs = {p.value(origin), p.slope(origin), p.coeffs[2]};
      q.origin = origin;
    }
    pieces.push_back(q);
  }
  if (std::isfinite(x_hi)) {
    const auto& p = moreau_piece(x_hi);
    pieces.push_back({x_hi, kInf, x_hi, {p.value(x_hi), lip, 0.0}, 0.0,
                      p.prox_slope * x_hi + p.prox_offset});
  }
  return EnvelopeFunction(std::move(pieces));
}

UniformGrid UniformGrid::symmetric(double half_width, double step) {
  const auto half = static_cast<Eigen::Index>(std::llround(half_width / step));
  return {-static_cast<double>(half) * step, step, 2 * half + 1};
}

GridInfConv infconv_grid(const Eigen::Ref<const Eigen::VectorXd>& f_values, const Cost& cost,
                         const UniformGrid& grid) {
  if (!(grid.step > 0.0) || !std::isfinite(grid.step)) {
    throw GridMismatch("grid step must be positive");
  }
  if (f_values.size() != grid.size) {
    throw GridMismatch("f_values has " + std::to_string(f_values.size()) + " entries, grid has " +
                       std::to_string(grid.size));
  }
  if (!f_values.allFinite()) throw std::invalid_argument("infconv_grid: f_values must be finite");

  const Eigen::Index n = grid.size;
  GridInfConv out{Eigen::VectorXd(n), std::vector<Eigen::Index>(static_cast<std::size_t>(n)),
                  SweepMethod::TwoPointer};
  if (n == 0) return out;

  // phi(x_i - x_j) depends on i - j only.
  Eigen::VectorXd phi(2 * n - 1);
  for (Eigen::Index d = -(n - 1); d <= n - 1; ++d) phi(d + n - 1) = cost(grid.step * static_cast<double>(d));
  auto value = [&](Eigen::Index i, Eigen::Index j) { return f_values(j) + phi(i - j + n - 1); };

  const double scale = 1.0 + f_values.cwiseAbs().maxCoeff();
  bool convex = true;
  for (Eigen::Index j = 1; j + 1 < n && convex; ++j) {
    convex = f_values(j - 1) - 2.0 * f_values(j) + f_values(j + 1) >= -1e-12 * scale;
  }

  if (convex) {
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      while (j + 1 < n && value(i, j + 1) <= value(i, j)) ++j;
      out.values(i) = value(i, j);
      out.argmin[static_cast<std::size_t>(i)] = j;
    }
    return out;
  }

  out.method = SweepMethod::DivideAndConquer;
  struct Task {
    Eigen::Index i_lo, i_hi, j_lo, j_hi;
  };
  std::vector<Task> stack{{0, n - 1, 0, n - 1}};
  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    if (task.i_lo > task.i_hi) continue;
    const Eigen::Index mid = (task.i_lo + task.i_hi) / 2;
    Eigen::Index best_j = task.j_lo;
    double best = value(mid, best_j);
    for (Eigen::Index j = task.j_lo + 1; j <= task.j_hi; ++j) {
      const double v = value(mid, j);
      if (v < best) {
        best = v;
        best_j = j;
      }
    }
    out.values(mid) = best;
    out.argmin[static_cast<std::size_t>(mid)] = best_j;
    stack.push_back({task.i_lo, mid - 1, task.j_lo, best_j});
    stack.push_back({mid + 1, task.i_hi, best_j, task.j_hi});
  }
  return out;
}

std::vector<double> default_probe_grid(const PLConvex& f, double cost_scale, double step) {
  const double x_max = std::max(20.0, 5.0 * cost_scale);
  const auto half = static_cast<long long>(std::llround(x_max / step));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(2 * half + 1));
  for (long long i = -half; i <= half; ++i) out.push_back(static_cast<double>(i) * step);
  const double fine = step / 10.0;
  for (double b : f.breakpoints()) {
    for (int i = -100; i <= 100; ++i) out.push_back(b + i * fine);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LemmaBoundReport lemma_bound_certificate(const PLConvex& f, double c1, double h,
                                         std::span<const double> probes) {
  if (!(c1 > 0.0) || !(h > 0.0)) throw std::invalid_argument("lemma_bound_certificate: C1, h > 0");
  const double bound = 1.0 / (c1 * h);
  if (f.max_abs_slope() > bound * (1.0 + 1e-12)) {
    throw SlopeBoundViolated("|f'| exceeds 1/(C1 h)");
  }
  const auto envelope = infconv_exact(f, Cost(h, 1.0 / c1));
  const auto df = discrete_gradient(f, h);
  LemmaBoundReport report;
  report.max_violation = -kInf;
  for (double x : probes) {
    const double d = df(x);
    const double violation = envelope(x) - (f(x) - 0.5 * c1 * d * d);
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_x = x;
    }
  }
  report.probes = probes.size();
  if (probes.empty()) report.max_violation = 0.0;
  return report;
}

}  // namespace cvxtau
