#include <doctest.h>

#include <cmath>

#include "cvxtau/poincare.hpp"
#include "cvxtau/tauverify.hpp"
#include "oracles.hpp"

using namespace cvxtau;
using doctest::Approx;

TEST_CASE("variance closed forms") {
  CHECK(variance(Measure1D::exponential(1.0), PLConvex::constant(3.0)) == Approx(0.0).scale(1.0));
  CHECK(variance(Measure1D::uniform(1.0), PLConvex::affine(1.0)) == Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(variance(Measure1D::exponential(1.0), PLConvex::abs()) == Approx(1.0).epsilon(1e-12));
  // TwoPoint(1), f_u at u = 0.5
  CHECK(variance(Measure1D::two_point(1.0), PLConvex::hinge(0.5)) == Approx(0.0625).epsilon(1e-15));
  CHECK(variance(Measure1D::uniform(1.0), PLConvex::hinge(0.0)) == Approx(5.0 / 48.0).epsilon(1e-13));
}

TEST_CASE("variance matches the double-sum identity on discrete measures") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Atom> atoms;
    const int k = 1 + static_cast<int>(uniform_open(rng) * 4);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const double m = uniform_in(rng, 0.1, 1.0);
      const double x = uniform_in(rng, 0.1, 3.0) + i * 3.0;
      atoms.push_back({x, m});
      atoms.push_back({-x, m});
      total += 2.0 * m;
    }
    for (auto& a : atoms) a.mass /= total;
    const auto mu = Measure1D::mix(atoms, {});
    const auto f = random_plconvex(rng);
    CHECK(variance(mu, f) == Approx(oracle::discrete_variance(atoms, f)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("Dirichlet energy") {
  CHECK(dirichlet_energy(Measure1D::uniform(1.0), PLConvex::constant(1.0)) == 0.0);
  CHECK(dirichlet_energy(Measure1D::uniform(1.0), PLConvex::hinge(0.0)) == Approx(0.5));
  CHECK(dirichlet_energy(Measure1D::exponential(1.0), PLConvex::hinge(0.0)) == Approx(0.5));
  CHECK(dirichlet_energy(Measure1D::two_point(1.0), PLConvex::hinge(1.0)) == Approx(0.5));
  CHECK(dirichlet_energy(Measure1D::gaussian(1.0), PLConvex::abs(2.0)) == Approx(4.0));
  // Against quadrature of the squared right slope.
  Rng rng(43);
  const auto mu = Measure1D::gaussian(1.3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_plconvex(rng);
    const double q = mu.integrate(
                           [&](double x) {
                             const double s = f.right_slope(x);
                             return s * s;
                           },
                           f.breakpoints())
                         .value;
    CHECK(dirichlet_energy(mu, f) == Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("cp lower bound") {
  const std::vector<double> u{0.5};
  const auto tp = cp_lower_bound(Measure1D::two_point(1.0), u, 0, 1);
  CHECK(tp.cp_lower == Approx(0.125));
  CHECK(tp.witness.has_value());
  const std::vector<double> zero{0.0};
  CHECK(cp_lower_bound(Measure1D::uniform(1.0), zero, 0, 1).cp_lower == Approx(5.0 / 24.0).epsilon(1e-12));
  const auto none = cp_lower_bound(Measure1D::uniform(1.0), {}, 0, 1);
  CHECK(none.cp_lower == 0.0);
  CHECK_FALSE(none.witness.has_value());

  // More trials never lower the estimate; the estimate never exceeds 4B.
  const auto mu = Measure1D::exponential(1.0);
  const auto grid = default_u_grid(mu, 64);
  double prev = 0.0;
  for (int trials : {0, 10, 40, 160}) {
    const double est = cp_lower_bound(mu, grid, trials, 5).cp_lower;
    CHECK(est >= prev);
    prev = est;
  }
  CHECK(prev <= 4.0 * muckenhoupt_B(mu));
  CHECK(cp_lower_bound(Measure1D::uniform(1.0), default_u_grid(Measure1D::uniform(1.0)), 100, 6).cp_lower <=
        4.0 * 0.25);
}

TEST_CASE("ratio is invariant under constants and reflection") {
  Rng rng(47);
  const auto mu = Measure1D::exponential(1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_plconvex(rng);
    const double ratio = variance(mu, f) / dirichlet_energy(mu, f);
    CHECK(variance(mu, f.plus(3.0)) / dirichlet_energy(mu, f.plus(3.0)) == Approx(ratio).epsilon(1e-9));
    const auto g = f.reflected();
    CHECK(variance(mu, g) / dirichlet_energy(mu, g) == Approx(ratio).epsilon(1e-9));
  }
}

TEST_CASE("(b) implies (a)") {
  const auto e = certify_b_implies_a(Measure1D::exponential(1.0), 4.0);
  CHECK(e.h == Approx(std::sqrt(32.0)));
  CHECK(e.membership.lambda_star == Approx(std::exp(-std::sqrt(32.0))).epsilon(1e-12));
  CHECK(e.pass);
  CHECK(e.hinge_slack >= -1e-12);
  const auto u = certify_b_implies_a(Measure1D::uniform(1.0), 1.0);
  CHECK(u.membership.lambda_star == 0.0);
  CHECK(u.pass);
  // An underestimated constant is exposed: cp = 0.01 gives h = 0.28.
  CHECK_FALSE(certify_b_implies_a(Measure1D::exponential(1.0), 0.01).pass);
}
