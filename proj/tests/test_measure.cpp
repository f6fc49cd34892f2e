#include <doctest.h>

#include <cmath>

#include "cvxtau/errors.hpp"
#include "cvxtau/measure.hpp"
#include "oracles.hpp"

using namespace cvxtau;
using doctest::Approx;

TEST_CASE("tails use the closed ray") {
  const auto e = Measure1D::exponential(1.0);
  CHECK(e.tail(0.0) == Approx(0.5).epsilon(1e-15));
  CHECK(e.tail(2.0) == Approx(std::exp(-2.0) / 2.0).epsilon(1e-14));
  const auto tp = Measure1D::two_point(1.0);
  CHECK(tp.tail(1.0) == 0.5);
  CHECK(tp.tail_open(1.0) == 0.0);
  CHECK(tp.atom_mass(-1.0) == 0.5);
}

TEST_CASE("tail is monotone, in [0, 1], and symmetric") {
  const std::vector<Measure1D> ms{
      Measure1D::exponential(2.0), Measure1D::uniform(1.5), Measure1D::gaussian(0.7), Measure1D::two_point(1.0),
      Measure1D::mix({{-0.5, 0.1}, {0.5, 0.1}, {0.0, 0.2}}, {{-1.0, 1.0, 0.3, 0.0}})};
  for (const auto& mu : ms) {
    double prev = 1.0;
    for (double x : oracle::linspace(-4.0, 4.0, 801)) {
      const double t = mu.tail(x);
      CHECK(t >= 0.0);
      CHECK(t <= prev + 1e-15);
      prev = t;
      // mu[x, inf) = mu(-inf, -x]
      CHECK(t == Approx(mu.cdf(-x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(Measure1D::mix({{1.0, 0.5}, {-1.0, 0.4}}, {}), InvalidMeasure);
  CHECK_THROWS_AS(Measure1D::mix({{1.0, 0.5}, {0.0, 0.5}}, {}), InvalidMeasure);
  CHECK_THROWS_AS(Measure1D::mix({}, {{-1.0, 0.5, 0.5, 0.0}, {0.0, 1.0, 0.5, 0.0}}), InvalidMeasure);
  CHECK_THROWS_AS(Measure1D::mix({{0.0, 1.5}}, {{-1.0, 1.0, -0.25, 0.0}}), InvalidMeasure);
  CHECK_THROWS_AS(Measure1D::uniform(-1.0), InvalidMeasure);
  CHECK_NOTHROW(Measure1D::mix({{1.0, 0.5}, {0.0, 0.5}}, {}, false));
}

TEST_CASE("lambda_star closed forms") {
  for (double h : {0.5, 1.0, 2.0}) {
    CHECK(lambda_star(Measure1D::exponential(1.0), h).lambda_star == Approx(std::exp(-h)).epsilon(1e-15));
  }
  CHECK(lambda_star(Measure1D::uniform(1.0), 1.0).lambda_star == 0.0);
  CHECK(lambda_star(Measure1D::uniform(1.0), 0.5).lambda_star == Approx(0.5));
  CHECK(lambda_star(Measure1D::two_point(1.0), 1.0).lambda_star == 1.0);
  CHECK(lambda_star(Measure1D::two_point(1.0), 1.01).lambda_star == 0.0);
}

TEST_CASE("lambda_star agrees with a dense scan") {
  const auto g = Measure1D::gaussian(1.0);
  for (double h : {0.25, 1.0, 3.0}) {
    const double scan = oracle::tail_ratio_scan(g, h, 8.0, 80000);
    const double got = lambda_star(g, h).lambda_star;
    CHECK(got >= scan - 1e-12);
    CHECK(got == Approx(scan).epsilon(1e-6));
  }
  const auto mix = Measure1D::mix({{-2.0, 0.15}, {2.0, 0.15}, {0.3, 0.05}, {-0.3, 0.05}},
                                  {{-1.0, 0.0, 0.3, 0.2}, {0.0, 1.0, 0.3, -0.2}, {-3.0, -2.5, 0.2, 0.0},
                                   {2.5, 3.0, 0.2, 0.0}});
  for (double h : {0.2, 0.7, 1.5, 2.2}) {
    std::vector<double> extra;
    for (double p : {0.0, 0.3, 1.0, 2.0, 2.5, 3.0}) {
      extra.push_back(p);
      extra.push_back(p - h);
      extra.push_back(std::nextafter(p, INFINITY));
      extra.push_back(std::nextafter(p - h, INFINITY));
    }
    const double scan = oracle::tail_ratio_scan(mix, h, 3.0, 30000, extra);
    const double got = lambda_star(mix, h).lambda_star;
    CHECK(got >= scan - 1e-12);
    CHECK(got <= scan + 1e-6);
  }
}

TEST_CASE("lambda_star is scale covariant and nonincreasing in h") {
  const auto mu = Measure1D::mix({{0.0, 0.2}}, {{-1.0, 1.0, 0.4, 0.0}});
  const auto nu = mu.scaled(3.0);
  double prev = 1.0;
  for (double h : {0.1, 0.4, 0.8, 1.2, 2.0}) {
    const double a = lambda_star(mu, h).lambda_star;
    CHECK(lambda_star(nu, 3.0 * h).lambda_star == Approx(a).epsilon(1e-9));
    CHECK(a <= prev + 1e-12);
    prev = a;
  }
}

TEST_CASE("support inside the open interval (-1, 1) gives lambda_star(1) = 0") {
  const auto mu = Measure1D::mix({{-0.9, 0.25}, {0.9, 0.25}}, {{-0.5, 0.5, 0.5, 0.0}});
  CHECK(lambda_star(mu, 1.0).lambda_star == 0.0);
  CHECK(membership(mu, 1.0, 0.0).member);
}

TEST_CASE("lambda_star requires a symmetric measure") {
  const auto mu = Measure1D::mix({{1.0, 0.5}, {0.0, 0.5}}, {}, false);
  CHECK_THROWS_AS(lambda_star(mu, 1.0), NotSymmetric);
  // tail(0.5) = tail(1) = 1/2, so the ratio hits 1 at x = 0.5.
  CHECK(tail_ratio_sup(mu, 0.5).lambda_star == 1.0);
  CHECK(tail_ratio_sup(mu, 1.5).lambda_star == 0.0);
}

TEST_CASE("Muckenhoupt constants") {
  CHECK(muckenhoupt_B(Measure1D::exponential(1.0)) == Approx(1.0).epsilon(1e-9));
  CHECK(muckenhoupt_B(Measure1D::exponential(2.0)) == Approx(0.25).epsilon(1e-9));
  CHECK(muckenhoupt_B(Measure1D::uniform(1.0)) == Approx(0.25).epsilon(1e-9));
  CHECK_THROWS_AS(muckenhoupt_B(Measure1D::two_point(1.0)), NoDensity);

  // sup_x x (1 - x) ln(2 / (1 - x)) by dense scan.
  double scan = 0.0;
  for (double x : oracle::linspace(1e-9, 1.0 - 1e-9, 200000)) {
    scan = std::max(scan, x * (1.0 - x) * std::log(2.0 / (1.0 - x)));
  }
  CHECK(bobkov_goetze_Bprime(Measure1D::uniform(1.0)) == Approx(scan).epsilon(1e-7));
  CHECK(std::isinf(bobkov_goetze_Bprime(Measure1D::exponential(1.0))));
  const double bg = bobkov_goetze_Bprime(Measure1D::gaussian(1.0));
  CHECK(std::isfinite(bg));
  CHECK(bg > 0.0);

  // Gaussian B against a direct scan of tail(x) * int_0^x 1/p.
  const auto g = Measure1D::gaussian(1.0);
  double gb = 0.0;
  for (double x : oracle::linspace(0.01, 6.0, 600)) {
    const double inv = oracle::simpson([](double y) { return std::sqrt(2.0 * M_PI) * std::exp(0.5 * y * y); }, 0.0, x, 2000);
    gb = std::max(gb, g.tail(x) * inv);
  }
  CHECK(muckenhoupt_B(g) == Approx(gb).epsilon(1e-4));
}

TEST_CASE("integration against closed-form moments") {
  const auto e = Measure1D::exponential(1.0);
  CHECK(e.integrate([](double x) { return x * x; }).value == Approx(2.0).epsilon(1e-12));
  CHECK(e.integrate([](double x) { return std::abs(x); }, std::vector<double>{0.0}).value == Approx(1.0).epsilon(1e-12));
  const auto u = Measure1D::uniform(1.0);
  CHECK(u.integrate([](double x) { return x * x; }).value == Approx(1.0 / 3.0).epsilon(1e-13));
  const auto tp = Measure1D::two_point(2.0);
  CHECK(tp.integrate([](double x) { return x * x * x * x; }).value == 16.0);
  const auto g = Measure1D::gaussian(2.0);
  CHECK(g.integrate([](double x) { return x * x; }).value == Approx(4.0).epsilon(1e-11));
}

TEST_CASE("quantile inverts the cdf") {
  const std::vector<Measure1D> ms{Measure1D::exponential(1.5), Measure1D::uniform(2.0), Measure1D::gaussian(1.0),
                                  Measure1D::mix({{0.0, 0.3}}, {{-1.0, 1.0, 0.35, 0.0}})};
  for (const auto& mu : ms) {
    for (double u : {0.01, 0.2, 0.5, 0.77, 0.99}) {
      const double x = mu.quantile(u);
      CHECK(mu.cdf(x) >= u - 1e-9);
      CHECK(mu.cdf(x - 1e-7) <= u + 1e-9);
    }
  }
  const auto tp = Measure1D::two_point(1.0);
  CHECK(tp.quantile(0.3) == -1.0);
  CHECK(tp.quantile(0.7) == 1.0);
}
