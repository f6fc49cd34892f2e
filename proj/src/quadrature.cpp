#include "cvxtau/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "cvxtau/errors.hpp"

namespace cvxtau {
namespace {

// Kronrod abscissae on [-1, 1], nonnegative half; odd indices are Gauss nodes.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& g, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double kronrod = fc * kWk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXk[j];
    const double f1 = g(center - dx);
    const double f2 = g(center + dx);
    kronrod += kWk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

Integral adaptive(const std::function<double(double)>& g, double a, double b,
                  const QuadratureOptions& options) {
  std::priority_queue<Panel> panels;
  Panel first = gauss_kronrod(g, a, b);
  double value = first.value;
  double error = first.error;
  panels.push(first);
  int count = 1;
  while (error > std::max(options.abs_tol, options.rel_tol * std::abs(value)) &&
         count < options.max_subintervals) {
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    panels.pop();
    Panel left = gauss_kronrod(g, worst.a, mid);
    Panel right = gauss_kronrod(g, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Recompute the totals from the partition to shed accumulated round-off.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  if (!std::isfinite(value) || !std::isfinite(error)) {
    throw DivergentIntegral("integrand produced a non-finite value");
  }
  return {value, error};
}

}  // namespace

Integral integrate_interval(const std::function<double(double)>& g, double lo, double hi,
                            const QuadratureOptions& options) {
  if (!(lo < hi)) return {};
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (lo_inf && hi_inf) {
    return integrate_interval(g, lo, 0.0, options) + integrate_interval(g, 0.0, hi, options);
  }
  if (!lo_inf && !hi_inf) return adaptive(g, lo, hi, options);

  // Half-line: x = anchor +- t / (1 - t), dx = dt / (1 - t)^2.
  const double anchor = lo_inf ? hi : lo;
  const double sign = lo_inf ? -1.0 : 1.0;
  auto mapped = [&](double t) {
    const double s = 1.0 - t;
    const double x = anchor + sign * t / s;
    if (std::isinf(x)) return 0.0;
    const double v = g(x);
    return v == 0.0 ? 0.0 : v / (s * s);
  };
  return adaptive(mapped, 0.0, 1.0, options);
}

}  // namespace cvxtau
