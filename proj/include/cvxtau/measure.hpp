#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cvxtau/numeric.hpp"
#include "cvxtau/quadrature.hpp"

namespace cvxtau {

/// Mass 1/2 at each of -a and +a.
struct TwoPoint {
  double a;
};

/// Uniform density 1/(2r) on [-r, r].
struct Uniform {
  double r;
};

/// Two-sided exponential with density (rate/2) exp(-rate |x|).
struct Exponential {
  double rate;
};

struct Gaussian {
  double sigma;
};

struct Atom {
  double position;
  double mass;
};

/// Affine density c0 + c1 x on [lo, hi].
struct DensityPiece {
  double lo;
  double hi;
  double c0;
  double c1;

  double density(double x) const { return c0 + c1 * x; }
  /// Integral of the density over [a, b] clipped to the piece.
  double mass(double a, double b) const;
};

struct AtomDensityMix {
  std::vector<Atom> atoms;
  std::vector<DensityPiece> pieces;
};

/// Interval on which the absolutely continuous part has a smooth density.
struct DensitySegment {
  double lo;
  double hi;
  std::function<double(double)> density;
};

/// Probability measure on the real line. Immutable once constructed.
///
/// Tails use the closed ray: tail(x) = mu[x, inf), so an atom at x counts.
class Measure1D {
 public:
  using Kind = std::variant<TwoPoint, Uniform, Exponential, Gaussian, AtomDensityMix>;

  /// Validates the invariants (mass, nonnegativity, sorted pieces, symmetry
  /// when flagged) and throws InvalidMeasure on failure.
  explicit Measure1D(Kind kind, bool symmetric = true);

  static Measure1D two_point(double a) { return Measure1D(TwoPoint{a}); }
  static Measure1D uniform(double r) { return Measure1D(Uniform{r}); }
  static Measure1D exponential(double rate) { return Measure1D(Exponential{rate}); }
  static Measure1D gaussian(double sigma) { return Measure1D(Gaussian{sigma}); }
  static Measure1D mix(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                       bool symmetric = true) {
    return Measure1D(AtomDensityMix{std::move(atoms), std::move(pieces)}, symmetric);
  }

  const Kind& kind() const { return kind_; }
  bool symmetric() const { return symmetric_; }
  std::string id() const;

  /// mu[x, inf)
  double tail(double x) const;
  /// mu(x, inf)
  double tail_open(double x) const;
  double cdf(double x) const { return 1.0 - tail_open(x); }
  double atom_mass(double x) const;
  /// Density of the absolutely continuous part (0 outside its support).
  double density(double x) const;

  std::vector<Atom> atoms() const;
  std::vector<DensitySegment> density_segments() const;
  bool has_density() const;

  /// Smallest and largest points of the support (possibly infinite).
  double support_lo() const;
  double support_hi() const;
  /// Point x >= 0 with tail(x) ~= q; the support end for compact measures.
  double tail_quantile(double q) const;
  /// Exponential decay rate of the tails; +inf for compact or Gaussian tails.
  double tail_decay_rate() const;

  /// Pushforward under x -> s x, s > 0.
  Measure1D scaled(double s) const;

  /// Inverse-CDF transform of u in (0, 1).
  double quantile(double u) const;

  /// Integral of g against mu: exact atom sums plus adaptive quadrature on
  /// every density segment, split at the supplied kinks of g.
  Integral integrate(const std::function<double(double)>& g, std::span<const double> kinks = {},
                     const QuadratureOptions& options = {}) const;

 private:
  Kind kind_;
  bool symmetric_;
};

/// Certificate for the tail-ratio class M(h, lambda).
struct MembershipCertificate {
  double h = 0.0;
  double lambda_star = 0.0;
  double witness = 0.0;
  /// False when the supremum is a right limit at the witness, not a value.
  bool attained = true;
  bool member = false;
};

/// sup over x >= 0 with tail(x) > 0 of tail(x + h) / tail(x).
MembershipCertificate lambda_star(const Measure1D& mu, double h, int probes = 4096);

/// The same supremum without the symmetry requirement; used for measures
/// supported on the half line.
MembershipCertificate tail_ratio_sup(const Measure1D& mu, double h, int probes = 4096);

/// Same as lambda_star, with `member` filled in for the queried lambda.
MembershipCertificate membership(const Measure1D& mu, double h, double lambda, int probes = 4096);

/// B = sup_{x>0} mu[x, inf) * int_0^x dy / p(y); +inf when it diverges.
double muckenhoupt_B(const Measure1D& mu, int probes = 4096);

/// B' = sup_{x>0} mu[x, inf) ln(1/mu[x, inf)) * int_0^x dy / p(y).
double bobkov_goetze_Bprime(const Measure1D& mu, int probes = 4096);

}  // namespace cvxtau
