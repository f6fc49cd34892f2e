#include "cvxtau/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cvxtau/errors.hpp"
#include "cvxtau/stats.hpp"

namespace cvxtau {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kMassTol = 1e-12;
constexpr double kSymmetryTol = 1e-12;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidMeasure(std::string(what) + " must be positive and finite");
  }
}

double gaussian_tail(double x, double sigma) {
  return 0.5 * std::erfc(x / (sigma * std::numbers::sqrt2));
}

// Maximize fn on [a, b] by golden-section search; fn assumed unimodal there.
template <class F>
std::pair<double, double> golden_max(F&& fn, double a, double b, int iterations = 80) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

// Grid supremum of a continuous-between-events functional, refined by a
// golden-section search in the cells around the best grid point. A value of
// +inf at any probe short-circuits.
template <class F>
double probe_sup(F&& fn, std::vector<double> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double best = -kInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = fn(points[i]);
    if (std::isinf(v) && v > 0) return kInf;
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (points.size() >= 2) {
    if (best_i > 0) best = std::max(best, golden_max(fn, points[best_i - 1], points[best_i]).second);
    if (best_i + 1 < points.size())
      best = std::max(best, golden_max(fn, points[best_i], points[best_i + 1]).second);
  }
  return best;
}

std::vector<double> uniform_points(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 2)));
  const int n = std::max(count, 2);
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

// int_a^b dy / (c0 + c1 y) on a piece, +inf if the density touches zero.
double inverse_piece_integral(const DensityPiece& piece, double a, double b) {
  if (!(b > a)) return 0.0;
  const double pa = piece.density(a);
  const double pb = piece.density(b);
  if (!(pa > 0.0) || !(pb > 0.0)) return kInf;
  if (piece.c1 == 0.0) return (b - a) / piece.c0;
  return std::log(pb / pa) / piece.c1;
}

// int_0^x dy / p(y) for the absolutely continuous part; +inf on gaps.
double inverse_density_integral(const Measure1D& mu, double x) {
  if (x <= 0.0) return 0.0;
  return std::visit(
      overloaded{
          [&](const TwoPoint&) { return kInf; },
          [&](const Uniform& u) { return x < u.r ? 2.0 * u.r * x : kInf; },
          [&](const Exponential& e) { return 2.0 * std::expm1(e.rate * x) / (e.rate * e.rate); },
          [&](const Gaussian& g) {
            const double s2 = g.sigma * g.sigma;
            auto inv = [&](double y) { return std::exp(0.5 * y * y / s2); };
            return std::sqrt(2.0 * std::numbers::pi) * g.sigma *
                   integrate_interval(inv, 0.0, x).value;
          },
          [&](const AtomDensityMix& m) {
            double covered = 0.0;
            double total = 0.0;
            for (const auto& piece : m.pieces) {
              if (piece.hi <= covered) continue;
              if (piece.lo > covered) return kInf;
              const double b = std::min(piece.hi, x);
              total += inverse_piece_integral(piece, std::max(piece.lo, 0.0), b);
              covered = piece.hi;
              if (covered >= x) return total;
            }
            return kInf;
          }},
      mu.kind());
}

}  // namespace

double DensityPiece::mass(double a, double b) const {
  const double u = std::max(a, lo);
  const double v = std::min(b, hi);
  if (!(v > u)) return 0.0;
  return c0 * (v - u) + 0.5 * c1 * (v - u) * (v + u);
}

Measure1D::Measure1D(Kind kind, bool symmetric) : kind_(std::move(kind)), symmetric_(symmetric) {
  std::visit(overloaded{[](const TwoPoint& k) { require_positive(k.a, "two-point position a"); },
                        [](const Uniform& k) { require_positive(k.r, "uniform half-width r"); },
                        [](const Exponential& k) { require_positive(k.rate, "exponential rate"); },
                        [](const Gaussian& k) { require_positive(k.sigma, "gaussian sigma"); },
                        [](AtomDensityMix& m) {
                          double total = 0.0;
                          for (const auto& atom : m.atoms) {
                            if (!(atom.mass >= 0.0) || !std::isfinite(atom.position)) {
                              throw InvalidMeasure("atom masses must be nonnegative");
                            }
                            total += atom.mass;
                          }
                          std::sort(m.atoms.begin(), m.atoms.end(),
                                    [](const Atom& a, const Atom& b) { return a.position < b.position; });
                          std::sort(m.pieces.begin(), m.pieces.end(),
                                    [](const DensityPiece& a, const DensityPiece& b) { return a.lo < b.lo; });
                          for (std::size_t i = 0; i < m.pieces.size(); ++i) {
                            const auto& p = m.pieces[i];
                            if (!(p.lo < p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi)) {
                              throw InvalidMeasure("density piece must have finite lo < hi");
                            }
                            if (p.density(p.lo) < -1e-15 || p.density(p.hi) < -1e-15) {
                              throw InvalidMeasure("density must be nonnegative on each piece");
                            }
                            if (i > 0 && m.pieces[i - 1].hi > p.lo) {
                              throw InvalidMeasure("density pieces overlap");
                            }
                            total += p.mass(p.lo, p.hi);
                          }
                          if (std::abs(total - 1.0) > kMassTol) {
                            std::ostringstream os;
                            os.precision(17);
                            os << "total mass " << total << " differs from 1";
                            throw InvalidMeasure(os.str());
                          }
                        }},
             kind_);

  if (symmetric_) {
    std::vector<double> probes = uniform_points(0.0, std::max(1.0, tail_quantile(1e-10)), 257);
    for (const auto& atom : atoms()) probes.push_back(std::abs(atom.position));
    if (const auto* m = std::get_if<AtomDensityMix>(&kind_)) {
      for (const auto& p : m->pieces) {
        probes.push_back(std::abs(p.lo));
        probes.push_back(std::abs(p.hi));
        probes.push_back(std::abs(0.5 * (p.lo + p.hi)));
      }
    }
    for (double x : probes) {
      const double reflected = 1.0 - tail_open(-x);  // mu(-inf, -x]
      if (std::abs(tail(x) - reflected) > kSymmetryTol) {
        throw InvalidMeasure("measure flagged symmetric but mu[x,inf) != mu(-inf,-x] at x = " +
                             std::to_string(x));
      }
    }
  }
}

std::string Measure1D::id() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{[&](const TwoPoint& k) { os << "two_point(a=" << k.a << ")"; },
                        [&](const Uniform& k) { os << "uniform(r=" << k.r << ")"; },
                        [&](const Exponential& k) { os << "exponential(rate=" << k.rate << ")"; },
                        [&](const Gaussian& k) { os << "gaussian(sigma=" << k.sigma << ")"; },
                        [&](const AtomDensityMix& m) {
                          os << "mix(atoms=" << m.atoms.size() << ",pieces=" << m.pieces.size()
                             << ")";
                        }},
             kind_);
  return os.str();
}

double Measure1D::tail(double x) const {
  return std::visit(
      overloaded{[&](const TwoPoint& k) { return x <= -k.a ? 1.0 : (x <= k.a ? 0.5 : 0.0); },
                 [&](const Uniform& k) { return std::clamp((k.r - x) / (2.0 * k.r), 0.0, 1.0); },
                 [&](const Exponential& k) {
                   return x >= 0.0 ? 0.5 * std::exp(-k.rate * x) : 1.0 - 0.5 * std::exp(k.rate * x);
                 },
                 [&](const Gaussian& k) { return gaussian_tail(x, k.sigma); },
                 [&](const AtomDensityMix& m) {
                   double t = 0.0;
                   for (const auto& atom : m.atoms)
                     if (atom.position >= x) t += atom.mass;
                   for (const auto& p : m.pieces) t += p.mass(x, p.hi);
                   return std::clamp(t, 0.0, 1.0);
                 }},
      kind_);
}

double Measure1D::tail_open(double x) const {
  return std::visit(overloaded{[&](const TwoPoint& k) { return x < -k.a ? 1.0 : (x < k.a ? 0.5 : 0.0); },
                               [&](const AtomDensityMix& m) {
                                 double t = 0.0;
                                 for (const auto& atom : m.atoms)
                                   if (atom.position > x) t += atom.mass;
                                 for (const auto& p : m.pieces) t += p.mass(x, p.hi);
                                 return std::clamp(t, 0.0, 1.0);
                               },
                               [&](const auto&) { return tail(x); }},
                    kind_);
}

double Measure1D::atom_mass(double x) const {
  double mass = 0.0;
  for (const auto& atom : atoms())
    if (atom.position == x) mass += atom.mass;
  return mass;
}

double Measure1D::density(double x) const {
  return std::visit(
      overloaded{[&](const TwoPoint&) { return 0.0; },
                 [&](const Uniform& k) { return std::abs(x) <= k.r ? 0.5 / k.r : 0.0; },
                 [&](const Exponential& k) { return 0.5 * k.rate * std::exp(-k.rate * std::abs(x)); },
                 [&](const Gaussian& k) {
                   const double z = x / k.sigma;
                   return std::exp(-0.5 * z * z) / (k.sigma * std::sqrt(2.0 * std::numbers::pi));
                 },
                 [&](const AtomDensityMix& m) {
                   double d = 0.0;
                   for (const auto& p : m.pieces)
                     if (x >= p.lo && x <= p.hi) d = std::max(d, p.density(x));
                   return d;
                 }},
      kind_);
}

std::vector<Atom> Measure1D::atoms() const {
  if (const auto* k = std::get_if<TwoPoint>(&kind_)) return {{-k->a, 0.5}, {k->a, 0.5}};
  if (const auto* m = std::get_if<AtomDensityMix>(&kind_)) return m->atoms;
  return {};
}

std::vector<DensitySegment> Measure1D::density_segments() const {
  return std::visit(
      overloaded{[&](const TwoPoint&) { return std::vector<DensitySegment>{}; },
                 [&](const Uniform& k) {
                   const double d = 0.5 / k.r;
                   return std::vector<DensitySegment>{{-k.r, k.r, [d](double) { return d; }}};
                 },
                 [&](const Exponential& k) {
                   const double rate = k.rate;
                   auto p = [rate](double x) { return 0.5 * rate * std::exp(-rate * std::abs(x)); };
                   return std::vector<DensitySegment>{{-kInf, 0.0, p}, {0.0, kInf, p}};
                 },
                 [&](const Gaussian& k) {
                   const double s = k.sigma;
                   auto p = [s](double x) {
                     const double z = x / s;
                     return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
                   };
                   return std::vector<DensitySegment>{{-kInf, 0.0, p}, {0.0, kInf, p}};
                 },
                 [&](const AtomDensityMix& m) {
                   std::vector<DensitySegment> out;
                   for (const auto& piece : m.pieces) {
                     if (piece.mass(piece.lo, piece.hi) <= 0.0) continue;
                     out.push_back({piece.lo, piece.hi, [piece](double x) { return piece.density(x); }});
                   }
                   return out;
                 }},
      kind_);
}

bool Measure1D::has_density() const { return !density_segments().empty(); }

double Measure1D::support_lo() const { return -support_hi(); }

double Measure1D::support_hi() const {
  return std::visit(overloaded{[](const TwoPoint& k) { return k.a; }, [](const Uniform& k) { return k.r; },
                               [](const Exponential&) { return kInf; }, [](const Gaussian&) { return kInf; },
                               [](const AtomDensityMix& m) {
                                 double hi = -kInf;
                                 for (const auto& a : m.atoms)
                                   if (a.mass > 0.0) hi = std::max(hi, std::abs(a.position));
                                 for (const auto& p : m.pieces)
                                   hi = std::max({hi, std::abs(p.lo), std::abs(p.hi)});
                                 return hi;
                               }},
                    kind_);
}

double Measure1D::tail_quantile(double q) const {
  return std::visit(overloaded{[&](const Exponential& k) { return std::log(0.5 / q) / k.rate; },
                               [&](const Gaussian& k) {
                                 return -k.sigma * normal_quantile(q);
                               },
                               [&](const auto&) { return support_hi(); }},
                    kind_);
}

double Measure1D::tail_decay_rate() const {
  if (const auto* k = std::get_if<Exponential>(&kind_)) return k->rate;
  return kInf;
}

Measure1D Measure1D::scaled(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return std::visit(overloaded{[&](const TwoPoint& k) { return Measure1D(TwoPoint{s * k.a}, symmetric_); },
                               [&](const Uniform& k) { return Measure1D(Uniform{s * k.r}, symmetric_); },
                               [&](const Exponential& k) {
                                 return Measure1D(Exponential{k.rate / s}, symmetric_);
                               },
                               [&](const Gaussian& k) { return Measure1D(Gaussian{s * k.sigma}, symmetric_); },
                               [&](const AtomDensityMix& m) {
                                 AtomDensityMix out;
                                 for (auto a : m.atoms) out.atoms.push_back({s * a.position, a.mass});
                                 for (auto p : m.pieces)
                                   out.pieces.push_back({s * p.lo, s * p.hi, p.c0 / s, p.c1 / (s * s)});
                                 return Measure1D(std::move(out), symmetric_);
                               }},
                    kind_);
}

double Measure1D::quantile(double u) const {
  return std::visit(
      overloaded{[&](const TwoPoint& k) { return u <= 0.5 ? -k.a : k.a; },
                 [&](const Uniform& k) { return k.r * (2.0 * u - 1.0); },
                 [&](const Exponential& k) {
                   return u < 0.5 ? std::log(2.0 * u) / k.rate : -std::log(2.0 * (1.0 - u)) / k.rate;
                 },
                 [&](const Gaussian& k) { return k.sigma * normal_quantile(u); },
                 [&](const AtomDensityMix& m) {
                   // Smallest x with cdf(x) >= u, by bisection on the right-continuous cdf.
                   double lo = -support_hi();
                   double hi = support_hi();
                   if (cdf(lo) >= u) return lo;
                   for (int i = 0; i < 200 && std::nextafter(lo, hi) < hi; ++i) {
                     const double mid = 0.5 * (lo + hi);
                     (cdf(mid) >= u ? hi : lo) = mid;
                   }
                   for (const auto& a : m.atoms)
                     if (std::abs(a.position - hi) <= 1e-12 * (1.0 + std::abs(hi))) return a.position;
                   return hi;
                 }},
      kind_);
}

Integral Measure1D::integrate(const std::function<double(double)>& g, std::span<const double> kinks,
                              const QuadratureOptions& options) const {
  Integral total;
  for (const auto& atom : atoms()) {
    if (atom.mass > 0.0) total.value += atom.mass * g(atom.position);
  }
  if (!std::isfinite(total.value)) throw DivergentIntegral("integrand is infinite at an atom");
  std::vector<double> cuts(kinks.begin(), kinks.end());
  std::sort(cuts.begin(), cuts.end());
  for (const auto& seg : density_segments()) {
    auto integrand = [&](double x) {
      const double p = seg.density(x);
      return p == 0.0 ? 0.0 : p * g(x);
    };
    double lo = seg.lo;
    for (double c : cuts) {
      if (c <= lo || c >= seg.hi) continue;
      total += integrate_interval(integrand, lo, c, options);
      lo = c;
    }
    total += integrate_interval(integrand, lo, seg.hi, options);
  }
  return total;
}

MembershipCertificate lambda_star(const Measure1D& mu, double h, int probes) {
  if (!mu.symmetric()) throw NotSymmetric();
  return tail_ratio_sup(mu, h, probes);
}

MembershipCertificate tail_ratio_sup(const Measure1D& mu, double h, int probes) {
  if (!(h > 0.0)) throw std::invalid_argument("tail ratio: h must be positive");

  MembershipCertificate cert;
  cert.h = h;
  cert.witness = 0.0;
  cert.attained = true;

  const auto closed = std::visit(
      overloaded{[&](const TwoPoint& k) { return std::optional<double>(h <= k.a ? 1.0 : 0.0); },
                 [&](const Uniform& k) { return std::optional<double>(std::max(0.0, 1.0 - h / k.r)); },
                 [&](const Exponential& k) { return std::optional<double>(std::exp(-k.rate * h)); },
                 // Log-concave tail: the ratio is nonincreasing, so x = 0 is extremal.
                 [&](const Gaussian& k) { return std::optional<double>(2.0 * gaussian_tail(h, k.sigma)); },
                 [&](const AtomDensityMix&) { return std::optional<double>(); }},
      mu.kind());
  if (closed) {
    cert.lambda_star = *closed;
    return cert;
  }

  // Probe grid plus mandatory event points; right limits catch suprema that
  // are approached but not attained just past an atom.
  const double x_max = mu.tail_quantile(1e-10);
  std::vector<double> points = uniform_points(0.0, x_max, probes);
  const auto& mix = std::get<AtomDensityMix>(mu.kind());
  auto add_event = [&](double e) {
    for (double p : {e, e - h})
      if (p >= 0.0) points.push_back(p);
  };
  for (const auto& a : mix.atoms) add_event(a.position);
  for (const auto& p : mix.pieces) {
    add_event(p.lo);
    add_event(p.hi);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  auto ratio = [&](double x) {
    const double den = mu.tail(x);
    return den > 0.0 ? mu.tail(x + h) / den : 0.0;
  };
  double best = 0.0;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i];
    const double r = ratio(x);
    if (r > best) {
      best = r;
      best_i = i;
      cert.witness = x;
      cert.attained = true;
    }
    const double den_open = mu.tail_open(x);
    if (den_open > 0.0) {
      const double r_open = mu.tail_open(x + h) / den_open;
      if (r_open > best) {
        best = r_open;
        best_i = i;
        cert.witness = x;
        cert.attained = false;
      }
    }
  }
  // Interior maxima between events.
  for (std::size_t j : {best_i > 0 ? best_i - 1 : best_i, best_i}) {
    if (j + 1 >= points.size()) continue;
    const double a = points[j];
    const double b = points[j + 1];
    const double span = b - a;
    auto [x, v] = golden_max(ratio, a + 1e-9 * span, b - 1e-9 * span);
    if (v > best) {
      best = v;
      cert.witness = x;
      cert.attained = true;
    }
  }
  cert.lambda_star = std::min(best, 1.0);
  return cert;
}

MembershipCertificate membership(const Measure1D& mu, double h, double lambda, int probes) {
  auto cert = lambda_star(mu, h, probes);
  cert.member = cert.lambda_star <= lambda;
  return cert;
}

namespace {

bool purely_atomic_positive_tail(const Measure1D& mu) {
  double density_mass = 0.0;
  if (const auto* m = std::get_if<AtomDensityMix>(&mu.kind())) {
    for (const auto& p : m->pieces) density_mass += p.mass(0.0, kInf);
  } else if (std::holds_alternative<TwoPoint>(mu.kind())) {
    density_mass = 0.0;
  } else {
    density_mass = 0.5;
  }
  return density_mass <= 0.0 && mu.tail_open(0.0) > 0.0;
}

template <class Weight>
double muckenhoupt_sup(const Measure1D& mu, int probes, Weight&& weight) {
  const double x_max = mu.tail_quantile(1e-10);
  std::vector<double> points = uniform_points(0.0, x_max, probes);
  points.erase(points.begin());  // x > 0
  if (const auto* m = std::get_if<AtomDensityMix>(&mu.kind())) {
    for (const auto& a : m->atoms)
      if (a.position > 0.0) points.push_back(a.position);
    for (const auto& p : m->pieces)
      for (double e : {p.lo, p.hi})
        if (e > 0.0) points.push_back(e);
  }
  auto product = [&](double x) {
    const double t = mu.tail(x);
    if (t <= 0.0) return 0.0;
    const double w = weight(t);
    if (w <= 0.0) return 0.0;
    const double inv = inverse_density_integral(mu, x);
    return std::isinf(inv) ? kInf : t * w * inv;
  };
  return std::max(0.0, probe_sup(product, std::move(points)));
}

}  // namespace

double muckenhoupt_B(const Measure1D& mu, int probes) {
  if (!mu.symmetric()) throw NotSymmetric();
  if (purely_atomic_positive_tail(mu)) throw NoDensity();
  if (const auto* e = std::get_if<Exponential>(&mu.kind())) return 1.0 / (e->rate * e->rate);
  if (const auto* u = std::get_if<Uniform>(&mu.kind())) return 0.25 * u->r * u->r;
  return muckenhoupt_sup(mu, probes, [](double) { return 1.0; });
}

double bobkov_goetze_Bprime(const Measure1D& mu, int probes) {
  if (!mu.symmetric()) throw NotSymmetric();
  if (purely_atomic_positive_tail(mu)) throw NoDensity();
  // (1 - e^{-rate x})(rate x + ln 2) / rate^2 grows without bound.
  if (std::holds_alternative<Exponential>(mu.kind())) return kInf;
  return muckenhoupt_sup(mu, probes, [](double t) { return std::log(1.0 / t); });
}

}  // namespace cvxtau
