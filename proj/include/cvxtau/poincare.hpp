#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvxtau/convexfn.hpp"
#include "cvxtau/measure.hpp"

namespace cvxtau {

/// Var_mu f, computed as the second moment of f - E f.
double variance(const Measure1D& mu, const PLConvex& f);

/// int (f')^2 dmu with f' the right derivative; closed form because f' is
/// piecewise constant.
double dirichlet_energy(const Measure1D& mu, const PLConvex& f);

struct PoincareEstimate {
  /// Best ratio Var f / int (f')^2 found; a lower bound on the convex
  /// Poincare constant.
  double cp_lower = 0.0;
  std::string witness_id;
  std::optional<PLConvex> witness;
  std::size_t probes = 0;
};

/// 256 points from 0 to the 1 - 1e-8 tail quantile.
std::vector<double> default_u_grid(const Measure1D& mu, int points = 256);

/// Hinges max{x - u, 0} over u_grid, then random convex trials.
PoincareEstimate cp_lower_bound(const Measure1D& mu, std::span<const double> u_grid,
                                int random_trials, std::uint64_t seed);

struct BImpliesAReport {
  double cp = 0.0;
  double h = 0.0;
  MembershipCertificate membership;
  /// min over the u grid of Var f_u - 2 cp mu[u + h, inf); the proof shows
  /// this is nonnegative whenever cp is a valid constant.
  double hinge_slack = 0.0;
  double hinge_slack_at = 0.0;
  bool pass = false;
};

/// lambda_star at h = sqrt(8 cp) against 1/2.
BImpliesAReport certify_b_implies_a(const Measure1D& mu, double cp);

}  // namespace cvxtau
