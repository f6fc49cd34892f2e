#pragma once

#include <json.hpp>
#include <initializer_list>
#include <string>

#include "cvxtau/concentration.hpp"
#include "cvxtau/convexfn.hpp"
#include "cvxtau/infconv.hpp"
#include "cvxtau/measure.hpp"

namespace cvxtau {

using Json = nlohmann::json;

/// Throws ConfigError naming the first key of `object` outside `allowed`.
void reject_unknown_keys(const Json& object, std::initializer_list<const char*> allowed,
                         const std::string& context);

/// {"kind": ..., "parameters": {...}} for the analytic kinds, or
/// {"kind": "mix", "atoms": [[x, m], ...], "density_pieces": [{"interval": [lo, hi],
/// "coeffs": [c0, c1]}, ...]}; "symmetric" defaults to true.
Measure1D measure_from_json(const Json& j);
Json to_json(const Measure1D& mu);

/// {"initial_slope": s0, "knots": [[b, s], ...], "anchor": [x, f(x)]}
PLConvex plconvex_from_json(const Json& j);
Json to_json(const PLConvex& f);

Json to_json(const EnvelopeFunction& env);

/// A vector entry may be a list of length n or a single number repeated n times.
Eigen::VectorXd vector_from_json(const Json& j, Eigen::Index n, const std::string& context);

/// Throws UnsupportedSet for an unknown "kind".
ConvexSet convex_set_from_json(const Json& j, Eigen::Index n);
Json to_json(const ConvexSet& set);

LipschitzFunction lipschitz_from_json(const Json& j, Eigen::Index n);

}  // namespace cvxtau
