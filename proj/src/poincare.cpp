#include "cvxtau/poincare.hpp"

#include <cmath>
#include <stdexcept>

namespace cvxtau {

double variance(const Measure1D& mu, const PLConvex& f) {
  const auto& kinks = f.breakpoints();
  const double mean = mu.integrate([&](double x) { return f(x); }, kinks).value;
  const double var = mu.integrate(
                           [&](double x) {
                             const double d = f(x) - mean;
                             return d * d;
                           },
                           kinks)
                         .value;
  return std::max(var, 0.0);
}

double dirichlet_energy(const Measure1D& mu, const PLConvex& f) {
  const auto& b = f.breakpoints();
  const auto& s = f.slopes();
  if (b.empty()) return s[0] * s[0];
  // s_i holds on [b_i, b_{i+1}), s_0 on (-inf, b_1).
  double energy = s[0] * s[0] * (1.0 - mu.tail(b[0]));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double upper = i + 1 < b.size() ? mu.tail(b[i + 1]) : 0.0;
    energy += s[i + 1] * s[i + 1] * (mu.tail(b[i]) - upper);
  }
  return energy;
}

std::vector<double> default_u_grid(const Measure1D& mu, int points) {
  std::vector<double> out;
  if (points <= 0) return out;
  const double top = mu.tail_quantile(1e-8);
  for (int i = 0; i < points; ++i) {
    out.push_back(points == 1 ? 0.0 : top * static_cast<double>(i) / (points - 1));
  }
  return out;
}

PoincareEstimate cp_lower_bound(const Measure1D& mu, std::span<const double> u_grid,
                                int random_trials, std::uint64_t seed) {
  PoincareEstimate est;
  auto consider = [&](const PLConvex& f, const std::string& id) {
    ++est.probes;
    const double energy = dirichlet_energy(mu, f);
    if (!(energy > 0.0)) return;
    const double ratio = variance(mu, f) / energy;
    if (ratio > est.cp_lower) {
      est.cp_lower = ratio;
      est.witness_id = id;
      est.witness = f;
    }
  };
  for (double u : u_grid) consider(PLConvex::hinge(u), "hinge(u=" + std::to_string(u) + ")");

  Rng rng(seed);
  RandomPLOptions options;
  const double reach = std::min(mu.tail_quantile(1e-6), 10.0);
  options.lo = -1.5 * reach;
  options.hi = 1.5 * reach;
  for (int i = 0; i < random_trials; ++i) {
    consider(random_plconvex(rng, options), "random#" + std::to_string(i));
  }
  return est;
}

BImpliesAReport certify_b_implies_a(const Measure1D& mu, double cp) {
  if (!(cp > 0.0)) throw std::invalid_argument("certify_b_implies_a: cp must be positive");
  BImpliesAReport report;
  report.cp = cp;
  report.h = std::sqrt(8.0 * cp);
  report.membership = membership(mu, report.h, 0.5);
  report.hinge_slack = kInf;
  for (double u : default_u_grid(mu)) {
    const double slack = variance(mu, PLConvex::hinge(u)) - 2.0 * cp * mu.tail(u + report.h);
    if (slack < report.hinge_slack) {
      report.hinge_slack = slack;
      report.hinge_slack_at = u;
    }
  }
  report.pass = report.membership.member;
  return report;
}

}  // namespace cvxtau
