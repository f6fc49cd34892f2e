#include "cvxtau/serialize.hpp"

#include <algorithm>

#include "cvxtau/errors.hpp"

namespace cvxtau {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Json& require(const Json& j, const char* key, const std::string& context) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& context) {
  if (!j.is_number()) throw ConfigError(context + ": expected a number");
  return j.get<double>();
}

double number_at(const Json& j, const char* key, const std::string& context) {
  return number(require(j, key, context), context + "." + key);
}

std::pair<double, double> pair_of(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(context + ": expected a pair [x, y]");
  return {number(j[0], context), number(j[1], context)};
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

void reject_unknown_keys(const Json& object, std::initializer_list<const char*> allowed,
                         const std::string& context) {
  if (!object.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& item : object.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError(context + ": unknown key '" + item.key() + "'");
  }
}

Measure1D measure_from_json(const Json& j) {
  const std::string ctx = "measure";
  const auto& kind_json = require(j, "kind", ctx);
  if (!kind_json.is_string()) throw ConfigError("measure.kind: expected a string");
  const auto kind = kind_json.get<std::string>();
  const bool symmetric = j.contains("symmetric") ? j.at("symmetric").get<bool>() : true;

  if (kind == "mix") {
    reject_unknown_keys(j, {"kind", "atoms", "density_pieces", "symmetric"}, ctx);
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
      for (const auto& a : j.at("atoms")) {
        const auto [x, m] = pair_of(a, "measure.atoms");
        atoms.push_back({x, m});
      }
    }
    std::vector<DensityPiece> pieces;
    if (j.contains("density_pieces")) {
      for (const auto& p : j.at("density_pieces")) {
        reject_unknown_keys(p, {"interval", "coeffs"}, "measure.density_pieces");
        const auto [lo, hi] = pair_of(require(p, "interval", "measure.density_pieces"), "interval");
        const auto [c0, c1] = pair_of(require(p, "coeffs", "measure.density_pieces"), "coeffs");
        pieces.push_back({lo, hi, c0, c1});
      }
    }
    return Measure1D::mix(std::move(atoms), std::move(pieces), symmetric);
  }

  reject_unknown_keys(j, {"kind", "parameters", "symmetric"}, ctx);
  const auto& params = require(j, "parameters", ctx);
  const std::string pctx = "measure.parameters";
  if (kind == "two_point") {
    reject_unknown_keys(params, {"a"}, pctx);
    return Measure1D(TwoPoint{number_at(params, "a", pctx)}, symmetric);
  }
  if (kind == "uniform") {
    reject_unknown_keys(params, {"r"}, pctx);
    return Measure1D(Uniform{number_at(params, "r", pctx)}, symmetric);
  }
  if (kind == "exponential") {
    reject_unknown_keys(params, {"rate"}, pctx);
    return Measure1D(Exponential{number_at(params, "rate", pctx)}, symmetric);
  }
  if (kind == "gaussian") {
    reject_unknown_keys(params, {"sigma"}, pctx);
    return Measure1D(Gaussian{number_at(params, "sigma", pctx)}, symmetric);
  }
  throw ConfigError("measure.kind: unknown kind '" + kind + "'");
}

Json to_json(const Measure1D& mu) {
  Json out = std::visit(
      overloaded{[](const TwoPoint& k) { return Json{{"kind", "two_point"}, {"parameters", {{"a", k.a}}}}; },
                 [](const Uniform& k) { return Json{{"kind", "uniform"}, {"parameters", {{"r", k.r}}}}; },
                 [](const Exponential& k) {
                   return Json{{"kind", "exponential"}, {"parameters", {{"rate", k.rate}}}};
                 },
                 [](const Gaussian& k) { return Json{{"kind", "gaussian"}, {"parameters", {{"sigma", k.sigma}}}}; },
                 [](const AtomDensityMix& m) {
                   Json atoms = Json::array();
                   for (const auto& a : m.atoms) atoms.push_back({a.position, a.mass});
                   Json pieces = Json::array();
                   for (const auto& p : m.pieces) {
                     pieces.push_back({{"interval", {p.lo, p.hi}}, {"coeffs", {p.c0, p.c1}}});
                   }
                   return Json{{"kind", "mix"}, {"atoms", atoms}, {"density_pieces", pieces}};
                 }},
      mu.kind());
  out["symmetric"] = mu.symmetric();
  return out;
}

PLConvex plconvex_from_json(const Json& j) {
  const std::string ctx = "function";
  reject_unknown_keys(j, {"initial_slope", "knots", "anchor"}, ctx);
  std::vector<double> slopes{number_at(j, "initial_slope", ctx)};
  std::vector<double> bp;
  if (j.contains("knots")) {
    for (const auto& k : j.at("knots")) {
      const auto [b, s] = pair_of(k, "function.knots");
      bp.push_back(b);
      slopes.push_back(s);
    }
  }
  double ax = 0.0;
  double av = 0.0;
  if (j.contains("anchor")) std::tie(ax, av) = pair_of(j.at("anchor"), "function.anchor");
  try {
    return PLConvex(std::move(bp), std::move(slopes), ax, av);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Json to_json(const PLConvex& f) {
  Json knots = Json::array();
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    knots.push_back({f.breakpoints()[i], f.slopes()[i + 1]});
  }
  const double ax = f.breakpoints().empty() ? 0.0 : f.breakpoints().front();
  return Json{{"initial_slope", f.first_slope()}, {"knots", knots}, {"anchor", {ax, f(ax)}}};
}

Json to_json(const EnvelopeFunction& env) {
  Json pieces = Json::array();
  auto finite_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  for (const auto& p : env.pieces()) {
    pieces.push_back({{"interval", {finite_or_null(p.lo), finite_or_null(p.hi)}},
                      {"origin", p.origin},
                      {"coeffs", {p.coeffs[0], p.coeffs[1], p.coeffs[2]}},
                      {"prox", {p.prox_slope, p.prox_offset}}});
  }
  return Json{{"pieces", pieces}};
}

Eigen::VectorXd vector_from_json(const Json& j, Eigen::Index n, const std::string& context) {
  if (j.is_number()) return Eigen::VectorXd::Constant(n, j.get<double>());
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw ConfigError(context + ": expected a number or a list of length " + std::to_string(n));
  }
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = number(j[static_cast<std::size_t>(i)], context);
  return v;
}

ConvexSet convex_set_from_json(const Json& j, Eigen::Index n) {
  const std::string ctx = "set";
  const auto kind = require(j, "kind", ctx).get<std::string>();
  if (kind == "half_space" || kind == "slab") {
    reject_unknown_keys(j, {"kind", "a", "c"}, ctx);
    auto a = vector_from_json(require(j, "a", ctx), n, "set.a");
    const double c = number_at(j, "c", ctx);
    if (kind == "half_space") return HalfSpace{std::move(a), c};
    if (c < 0.0) throw ConfigError("set.c: a slab needs c >= 0");
    return Slab{std::move(a), c};
  }
  if (kind == "l2_ball" || kind == "l1_ball") {
    reject_unknown_keys(j, {"kind", "center", "radius"}, ctx);
    auto center = j.contains("center") ? vector_from_json(j.at("center"), n, "set.center")
                                       : Eigen::VectorXd::Zero(n).eval();
    const double r = number_at(j, "radius", ctx);
    if (r < 0.0) throw ConfigError("set.radius: must be >= 0");
    if (kind == "l2_ball") return L2Ball{std::move(center), r};
    return L1Ball{std::move(center), r};
  }
  throw UnsupportedSet("set.kind: unsupported family '" + kind + "'");
}

Json to_json(const ConvexSet& set) {
  return std::visit(
      overloaded{[](const HalfSpace& s) { return Json{{"kind", "half_space"}, {"a", vector_json(s.a)}, {"c", s.c}}; },
                 [](const Slab& s) { return Json{{"kind", "slab"}, {"a", vector_json(s.a)}, {"c", s.c}}; },
                 [](const L2Ball& s) {
                   return Json{{"kind", "l2_ball"}, {"center", vector_json(s.center)}, {"radius", s.radius}};
                 },
                 [](const L1Ball& s) {
                   return Json{{"kind", "l1_ball"}, {"center", vector_json(s.center)}, {"radius", s.radius}};
                 }},
      set);
}

LipschitzFunction lipschitz_from_json(const Json& j, Eigen::Index n) {
  const std::string ctx = "function";
  const auto kind = require(j, "kind", ctx).get<std::string>();
  if (kind == "linear") {
    reject_unknown_keys(j, {"kind", "w"}, ctx);
    return LinearFunction{vector_from_json(require(j, "w", ctx), n, "function.w")};
  }
  if (kind == "max_coordinate") {
    reject_unknown_keys(j, {"kind"}, ctx);
    return MaxCoordinate{};
  }
  if (kind == "pl_of_linear") {
    reject_unknown_keys(j, {"kind", "g", "w"}, ctx);
    return PLOfLinear{plconvex_from_json(require(j, "g", ctx)),
                      vector_from_json(require(j, "w", ctx), n, "function.w")};
  }
  throw ConfigError("function.kind: unknown kind '" + kind + "'");
}

}  // namespace cvxtau
