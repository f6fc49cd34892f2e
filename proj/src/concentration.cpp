#include "cvxtau/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cvxtau/errors.hpp"
#include "cvxtau/stats.hpp"
#include "cvxtau/tauverify.hpp"

namespace cvxtau {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dimension(const ConvexSet& set, Eigen::Index n) {
  const Eigen::Index d = std::visit(overloaded{[](const HalfSpace& s) { return s.a.size(); },
                                               [](const Slab& s) { return s.a.size(); },
                                               [](const L2Ball& s) { return s.center.size(); },
                                               [](const L1Ball& s) { return s.center.size(); }},
                                    set);
  if (d != n) {
    throw std::invalid_argument("set has dimension " + std::to_string(d) + ", samples have " +
                                std::to_string(n));
  }
}

void require_class(const ProductMeasure& pm, double h, double lambda) {
  for (const auto& mu : pm.factors) {
    const auto cert = lambda_star(mu, h);
    if (cert.lambda_star > lambda + 1e-12) {
      throw NotInClass(mu.id() + " has lambda_star(" + std::to_string(h) +
                       ") = " + std::to_string(cert.lambda_star) + " > " + std::to_string(lambda));
    }
  }
}

Eigen::Index count_base(const ConvexSet& set, const Eigen::MatrixXd& x) {
  Eigen::Index in = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) in += contains(set, x.row(i).transpose()) ? 1 : 0;
  if (in == 0) throw EmptyBase();
  return in;
}

// Shared bookkeeping for corr1 and gencon: given the per-t membership test,
// fill rows whose radius covers both the enlargement frequency and mu(A).
template <class Member>
ConcentrationReport run_enlargement(const ConvexSet& set, const Eigen::MatrixXd& x,
                                    std::span<const double> t_grid, Member member) {
  ConcentrationReport report;
  report.set_family = family(set);
  report.samples = x.rows();
  const Eigen::Index base = count_base(set, x);
  report.base_probability = static_cast<double>(base) / static_cast<double>(x.rows());
  const double z = bonferroni_z(kConfidence, static_cast<int>(t_grid.size()) + 1);
  const double base_lo = wilson_interval(base, x.rows(), z).lower;

  for (double t : t_grid) {
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) hits += member(t, x.row(i).transpose()) ? 1 : 0;
    ConcentrationRow row;
    row.t = t;
    row.empirical = static_cast<double>(hits) / static_cast<double>(x.rows());
    const double tail = std::exp(-t);
    row.bound = 1.0 - tail / report.base_probability;
    row.radius = (wilson_interval(hits, x.rows(), z).upper - row.empirical) +
                 tail * (1.0 / base_lo - 1.0 / report.base_probability);
    row.pass = row.empirical >= row.bound - row.radius;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace

Eigen::MatrixXd sample(const ProductMeasure& pm, Eigen::Index count, std::uint64_t seed) {
  const Eigen::Index n = pm.dimension();
  Eigen::MatrixXd out(count, n);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = pm.factors[static_cast<std::size_t>(j)].quantile(uniform_open(rng));
  }
  return out;
}

std::string family(const ConvexSet& set) {
  return std::visit(overloaded{[](const HalfSpace&) { return std::string("half_space"); },
                               [](const Slab&) { return std::string("slab"); },
                               [](const L2Ball&) { return std::string("l2_ball"); },
                               [](const L1Ball&) { return std::string("l1_ball"); }},
                    set);
}

bool contains(const ConvexSet& set, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::visit(overloaded{[&](const HalfSpace& s) { return s.a.dot(x) <= s.c; },
                               [&](const Slab& s) { return std::abs(s.a.dot(x)) <= s.c; },
                               [&](const L2Ball& s) { return (x - s.center).norm() <= s.radius; },
                               [&](const L1Ball& s) { return (x - s.center).lpNorm<1>() <= s.radius; }},
                    set);
}

double distance_to_l1_ball(const Eigen::Ref<const Eigen::VectorXd>& z, double radius) {
  if (!(radius > 0.0)) return z.norm();
  const Eigen::VectorXd mag = z.cwiseAbs();
  if (mag.sum() <= radius) return 0.0;
  // Projection is soft thresholding at theta with sum (|z_i| - theta)_+ = radius.
  std::vector<double> u(mag.data(), mag.data() + mag.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (u[k] > candidate) theta = candidate;
  }
  return mag.cwiseMin(theta).norm();
}

bool enlargement_member(const ConvexSet& set, const Eigen::Ref<const Eigen::VectorXd>& x, double s,
                        double r) {
  return std::visit(
      overloaded{[&](const HalfSpace& h) {
                   return h.a.dot(x) <= h.c + s * h.a.norm() + r * h.a.lpNorm<Eigen::Infinity>();
                 },
                 [&](const Slab& h) {
                   return std::abs(h.a.dot(x)) <= h.c + s * h.a.norm() + r * h.a.lpNorm<Eigen::Infinity>();
                 },
                 [&](const L2Ball& b) { return distance_to_l1_ball(x - b.center, r) <= b.radius + s; },
                 [&](const L1Ball& b) { return distance_to_l1_ball(x - b.center, b.radius + r) <= s; }},
      set);
}

double cost_ball_support(const Eigen::Ref<const Eigen::VectorXd>& a, double c_tau, double t) {
  if (!(t > 0.0)) return 0.0;
  const double l2 = a.norm();
  const double linf = a.lpNorm<Eigen::Infinity>();
  if (linf == 0.0) return 0.0;
  const double root = std::sqrt(2.0 * t);
  // Lagrange multiplier l2 / sqrt(2t) is admissible while it dominates every
  // |a_i|; past that the largest coordinates move onto the linear part of phi0.
  if (l2 / root >= linf) return c_tau * root * l2;
  return c_tau * (linf * t + l2 * l2 / (2.0 * linf));
}

bool ConcentrationReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ConcentrationRow& r) { return r.pass; });
}

ConcentrationReport verify_corr1(const ProductMeasure& pm, const ConvexSet& set, double h, double lambda,
                                 std::span<const double> t_grid, Eigen::Index samples, std::uint64_t seed) {
  require_dimension(set, pm.dimension());
  require_class(pm, h, lambda);
  const double c = theorem_c_tau(h, lambda);
  const Eigen::MatrixXd x = sample(pm, samples, seed);
  auto report = run_enlargement(set, x, t_grid, [&](double t, const Eigen::VectorXd& row) {
    return enlargement_member(set, row, std::sqrt(2.0 * t) * c, 2.0 * t * c);
  });
  report.experiment = "corr1";
  report.c_tau = c;
  return report;
}

ConcentrationReport verify_gencon(const ProductMeasure& pm, const ConvexSet& set, double c_tau,
                                  std::span<const double> t_grid, Eigen::Index samples, std::uint64_t seed) {
  require_dimension(set, pm.dimension());
  if (!(c_tau > 0.0)) throw std::invalid_argument("verify_gencon: C_tau must be positive");
  const Eigen::MatrixXd x = sample(pm, samples, seed);
  const bool exact = std::holds_alternative<HalfSpace>(set) || std::holds_alternative<Slab>(set);
  auto report = run_enlargement(set, x, t_grid, [&](double t, const Eigen::VectorXd& row) {
    if (const auto* hs = std::get_if<HalfSpace>(&set)) {
      return hs->a.dot(row) <= hs->c + cost_ball_support(hs->a, c_tau, t);
    }
    if (const auto* sl = std::get_if<Slab>(&set)) {
      return std::abs(sl->a.dot(row)) <= sl->c + cost_ball_support(sl->a, c_tau, t);
    }
    return enlargement_member(set, row, std::sqrt(2.0 * t) * c_tau, 2.0 * t * c_tau);
  });
  report.experiment = "gencon";
  report.exact = exact;
  report.c_tau = c_tau;
  return report;
}

std::string family(const LipschitzFunction& f) {
  return std::visit(overloaded{[](const LinearFunction&) { return std::string("linear"); },
                               [](const MaxCoordinate&) { return std::string("max_coordinate"); },
                               [](const PLOfLinear&) { return std::string("pl_of_linear"); }},
                    f);
}

Eigen::VectorXd evaluate_rows(const LipschitzFunction& f, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  return std::visit(overloaded{[&](const LinearFunction& l) -> Eigen::VectorXd { return x * l.w; },
                               [&](const MaxCoordinate&) -> Eigen::VectorXd { return x.rowwise().maxCoeff(); },
                               [&](const PLOfLinear& p) -> Eigen::VectorXd {
                                 Eigen::VectorXd v = x * p.w;
                                 for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = p.g(v(i));
                                 return v;
                               }},
                    f);
}

double corr2_bound(double t, double a, double b) {
  return 2.0 * std::exp(-0.125 * std::min(t / b, t * t / (a * a)));
}

bool corr2_exponent_consistent(double a, double b, double t, double tol) {
  const double r = a * std::sqrt(2.0 * t) + 2.0 * b * t;
  return 0.125 * std::min(r / b, r * r / (a * a)) <= t + tol;
}

bool Corr2Report::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const Corr2Row& r) { return r.upper_pass && r.lower_pass; });
}

Corr2Report verify_corr2(const ProductMeasure& pm, const LipschitzFunction& f, double a, double b, double h,
                         double lambda, std::span<const double> t_grid, Eigen::Index samples,
                         std::uint64_t seed) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("verify_corr2: a and b must be positive");
  if (samples <= 0) throw std::invalid_argument("verify_corr2: need at least one sample");
  require_class(pm, h, lambda);
  Corr2Report report;
  report.function_family = family(f);
  report.c_tau = theorem_c_tau(h, lambda);
  report.a = a;
  report.b = b;
  report.samples = samples;

  const Eigen::MatrixXd x = sample(pm, samples, seed);
  Eigen::VectorXd v = evaluate_rows(f, x);
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(samples);
  const double z = bonferroni_z(kConfidence, 2 * static_cast<int>(t_grid.size()) + 2);
  // Order statistics bracketing the population median at the same confidence.
  const auto last = static_cast<double>(samples - 1);
  const auto lo_idx = static_cast<std::size_t>(std::clamp(std::floor(0.5 * n - 0.5 * z * std::sqrt(n)), 0.0, last));
  const auto hi_idx = static_cast<std::size_t>(std::clamp(std::ceil(0.5 * n + 0.5 * z * std::sqrt(n)), 0.0, last));
  report.median = sorted[static_cast<std::size_t>((samples - 1) / 2)];
  report.median_lo = sorted[lo_idx];
  report.median_hi = sorted[hi_idx];

  for (double t : t_grid) {
    Corr2Row row;
    row.t = t;
    row.bound = corr2_bound(t, a, b);
    const double up = report.median_hi + report.c_tau * t;
    const double down = report.median_lo - report.c_tau * t;
    const auto above = static_cast<std::int64_t>(std::count_if(sorted.begin(), sorted.end(), [&](double s) { return s > up; }));
    const auto below = static_cast<std::int64_t>(std::count_if(sorted.begin(), sorted.end(), [&](double s) { return s < down; }));
    row.upper_empirical = static_cast<double>(above) / n;
    row.lower_empirical = static_cast<double>(below) / n;
    row.upper_radius = row.upper_empirical - wilson_interval(above, samples, z).lower;
    row.lower_radius = row.lower_empirical - wilson_interval(below, samples, z).lower;
    row.upper_pass = row.upper_empirical <= row.bound + row.upper_radius;
    row.lower_pass = row.lower_empirical <= row.bound + row.lower_radius;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace cvxtau
