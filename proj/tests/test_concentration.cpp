#include <doctest.h>

#include <cmath>

#include "cvxtau/concentration.hpp"
#include "cvxtau/errors.hpp"
#include "cvxtau/infconv.hpp"
#include "cvxtau/tauverify.hpp"

using namespace cvxtau;
using doctest::Approx;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Random point of s B2 + r B1 (not uniform; only membership matters).
Eigen::VectorXd draw_sum(Rng& rng, Eigen::Index n, double s, double r) {
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = standard_normal(rng);
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = uniform_in(rng, -1.0, 1.0) * std::pow(uniform_open(rng), 4.0);
  const double l1 = e.lpNorm<1>();
  return s * std::pow(uniform_open(rng), 1.0 / static_cast<double>(n)) * g / g.norm() +
         (l1 > 0.0 ? (r * uniform_open(rng) / l1) * e : e);
}

}  // namespace

TEST_CASE("sampling") {
  const auto one = sample(ProductMeasure::iid(Measure1D::two_point(1.0), 1), 4, 9);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(one(i, 0)) == 1.0);
  CHECK(sample(ProductMeasure::iid(Measure1D::uniform(1.0), 3), 0, 1).rows() == 0);

  const auto x = sample(ProductMeasure::iid(Measure1D::exponential(1.0), 2), 100000, 11);
  // sd of the mean: sqrt(2 / 1e5)
  for (Eigen::Index j = 0; j < 2; ++j) CHECK(std::abs(x.col(j).mean()) <= 3.0 * std::sqrt(2.0 / 1e5));
  CHECK(sample(ProductMeasure::iid(Measure1D::gaussian(1.0), 3), 50, 5) ==
        sample(ProductMeasure::iid(Measure1D::gaussian(1.0), 3), 50, 5));
}

TEST_CASE("enlargement membership examples") {
  const ConvexSet hs = HalfSpace{vec({1.0, 0.0}), 0.0};
  CHECK(enlargement_member(hs, vec({0.5, 7.0}), 0.5, 0.0));
  const ConvexSet diag = HalfSpace{vec({1.0, 1.0}) / std::sqrt(2.0), 0.0};
  CHECK_FALSE(enlargement_member(diag, vec({1.0, 1.0}), 0.0, 1.0));
  const ConvexSet ball = L2Ball{vec({0.0, 0.0}), 1.0};
  CHECK(enlargement_member(ball, vec({0.3, 0.3}), 0.0, 0.0));
  CHECK(enlargement_member(ball, vec({2.0, 0.0}), 0.5, 0.5));
  CHECK_FALSE(enlargement_member(ball, vec({2.0, 0.0}), 0.4, 0.5));
  const ConvexSet l1 = L1Ball{vec({0.0, 0.0}), 1.0};
  CHECK(enlargement_member(l1, vec({1.5, 0.5}), 0.0, 1.0));
  CHECK_FALSE(enlargement_member(l1, vec({1.5, 0.6}), 0.0, 1.0));
}

TEST_CASE("distance to the l1 ball") {
  CHECK(distance_to_l1_ball(vec({3.0, 0.0}), 1.0) == Approx(2.0));
  CHECK(distance_to_l1_ball(vec({1.0, 1.0}), 1.0) == Approx(std::sqrt(0.5)));
  CHECK(distance_to_l1_ball(vec({0.2, -0.3}), 1.0) == 0.0);
  CHECK(distance_to_l1_ball(vec({3.0, 4.0}), 0.0) == Approx(5.0));
  // Brute force in 2-D: scan the boundary of the ball.
  Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd z = vec({uniform_in(rng, -3, 3), uniform_in(rng, -3, 3)});
    const double r = uniform_in(rng, 0.1, 2.0);
    double best = z.lpNorm<1>() <= r ? 0.0 : INFINITY;
    for (int i = 0; i < 40000; ++i) {
      const double t = 4.0 * i / 40000.0;
      const int side = static_cast<int>(t);
      const double f = t - side;
      const double sx = side == 0 || side == 3 ? 1.0 : -1.0;
      const double sy = side < 2 ? 1.0 : -1.0;
      const Eigen::VectorXd p = vec({sx * r * (1.0 - f), sy * r * f});
      best = std::min(best, (z - p).norm());
    }
    CHECK(distance_to_l1_ball(z, r) == Approx(best).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("enlargement is monotone and exact for half-spaces") {
  Rng rng(59);
  for (int trial = 0; trial < 10000; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(uniform_open(rng) * 4);
    Eigen::VectorXd a(n);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i) = standard_normal(rng);
      x(i) = 2.0 * standard_normal(rng);
    }
    const ConvexSet hs = HalfSpace{a, uniform_in(rng, -1.0, 1.0)};
    const double s = uniform_in(rng, 0.0, 2.0);
    const double r = uniform_in(rng, 0.0, 2.0);
    const bool in = enlargement_member(hs, x, s, r);
    CHECK((!in || enlargement_member(hs, x, s + 0.1, r)));
    CHECK((!in || enlargement_member(hs, x, s, r + 0.1)));
    // Any x = a0 + y with a0 in A and y in s B2 + r B1 must be a member.
    const Eigen::VectorXd y = draw_sum(rng, n, s, r);
    Eigen::VectorXd base = x;
    const double over = a.dot(base) - std::get<HalfSpace>(hs).c;
    if (over > 0.0) base -= (over / a.squaredNorm()) * a;
    CHECK(enlargement_member(hs, base + y, s, r));
  }
}

TEST_CASE("support function of the cost ball") {
  CHECK(cost_ball_support(vec({1.0, 0.0}), 3.0, 0.0) == 0.0);
  Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(uniform_open(rng) * 5);
    Eigen::VectorXd a(n);
    for (Eigen::Index i = 0; i < n; ++i) a(i) = standard_normal(rng);
    const double c = uniform_in(rng, 0.5, 5.0);
    const double t = std::exp(uniform_in(rng, std::log(0.01), std::log(10.0)));
    const double h = cost_ball_support(a, c, t);
    // Bounded by the corr1 superset support.
    CHECK(h <= c * (std::sqrt(2.0 * t) * a.norm() + 2.0 * t * a.lpNorm<Eigen::Infinity>()) * (1 + 1e-12));
    // Random feasible points never beat it, and the scaled maximizer direction reaches it.
    for (int k = 0; k < 200; ++k) {
      Eigen::VectorXd y(n);
      for (Eigen::Index i = 0; i < n; ++i) y(i) = standard_normal(rng);
      double cost = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) cost += Cost::phi0(y(i) / c);
      // Rescale onto the level set by bisection on the scale factor.
      double lo = 0.0;
      double hi = 1.0;
      auto level = [&](double m) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += Cost::phi0(m * y(i) / c);
        return s;
      };
      while (level(hi) < t) hi *= 2.0;
      for (int it = 0; it < 100; ++it) (level(0.5 * (lo + hi)) < t ? lo : hi) = 0.5 * (lo + hi);
      CHECK(a.dot(lo * y) <= h * (1.0 + 1e-9) + 1e-12);
      (void)cost;
    }
  }
}

TEST_CASE("cost ball sits inside the corr1 enlargement") {
  Rng rng(67);
  const double c = theorem_c_tau(1.0, std::exp(-1.0));
  int tested = 0;
  while (tested < 10000) {
    const Eigen::Index n = 4;
    const double t = uniform_in(rng, 0.1, 4.0);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = uniform_in(rng, -3.0, 3.0) * c * t;
    double level = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) level += Cost::phi0(x(i) / c);
    if (level > t) continue;
    ++tested;
    CHECK(distance_to_l1_ball(x, 2.0 * t * c) <= std::sqrt(2.0 * t) * c * (1.0 + 1e-12));
  }
}

TEST_CASE("corr1 and gencon reports") {
  const std::vector<double> ts{0.5, 1.0, 2.0, 4.0};
  const auto pm = ProductMeasure::iid(Measure1D::exponential(1.0), 4);
  const ConvexSet hs = HalfSpace{vec({1.0, 0.0, 0.0, 0.0}), 0.0};
  const auto r = verify_corr1(pm, hs, 1.0, std::exp(-1.0), ts, 20000, 3);
  CHECK(r.pass());
  CHECK(r.rows.size() == 4);
  CHECK(r.base_probability == Approx(0.5).epsilon(0.03));
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].empirical >= r.rows[i - 1].empirical);

  const std::vector<double> t2{0.0, 2.0};
  const auto g = verify_gencon(pm, hs, theorem_c_tau(1.0, std::exp(-1.0)), t2, 20000, 4);
  CHECK(g.pass());
  CHECK(g.exact);
  CHECK(g.rows[0].bound <= 0.0);
  const ConvexSet ball = L2Ball{Eigen::VectorXd::Zero(4), 1.0};
  CHECK_FALSE(verify_gencon(pm, ball, 5.0, t2, 2000, 4).exact);

  const ConvexSet far = HalfSpace{vec({1.0, 0.0, 0.0, 0.0}), -1e6};
  CHECK_THROWS_AS(verify_corr1(pm, far, 1.0, std::exp(-1.0), ts, 1000, 3), EmptyBase);
  CHECK_THROWS_AS(verify_corr1(pm, hs, 1.0, 0.1, ts, 1000, 3), NotInClass);
}

TEST_CASE("corr2 bound and scalar implication") {
  CHECK(corr2_bound(0.0, 1.0, 1.0) == 2.0);
  // a = 1, b = 1/4: t / b = 4t and t^2 / a^2 = t^2 cross at t = 4.
  CHECK(corr2_bound(2.0, 1.0, 0.25) == Approx(2.0 * std::exp(-0.5)));
  CHECK(corr2_bound(8.0, 1.0, 0.25) == Approx(2.0 * std::exp(-4.0)));
  for (double a : {0.1, 1.0, 7.0})
    for (double b : {0.05, 1.0, 3.0})
      for (double t : {0.0, 0.01, 1.0, 50.0}) CHECK(corr2_exponent_consistent(a, b, t));
}

TEST_CASE("corr2 reports") {
  const std::vector<double> ts{1.0, 2.0, 4.0, 8.0};
  const auto pm = ProductMeasure::iid(Measure1D::uniform(1.0), 16);
  const auto r = verify_corr2(pm, LinearFunction{Eigen::VectorXd::Constant(16, 0.25)}, 1.0, 0.25, 1.01, 0.0, ts,
                              20000, 7);
  CHECK(r.pass());
  CHECK(r.median_lo <= r.median);
  CHECK(r.median <= r.median_hi);
  const auto m = verify_corr2(pm, MaxCoordinate{}, 1.0, 1.0, 1.01, 0.0, ts, 20000, 7);
  CHECK(m.pass());
  const auto p = verify_corr2(pm, PLOfLinear{PLConvex::abs(), Eigen::VectorXd::Constant(16, 0.25)}, 1.0, 0.25, 1.01,
                              0.0, ts, 20000, 7);
  CHECK(p.pass());
}
