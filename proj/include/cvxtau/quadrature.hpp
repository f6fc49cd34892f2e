#pragma once

#include <functional>

namespace cvxtau {

/// Value of an integral together with an estimate of its absolute error.
struct Integral {
  double value = 0.0;
  double error = 0.0;

  Integral& operator+=(const Integral& other) {
    value += other.value;
    error += other.error;
    return *this;
  }
};

inline Integral operator+(Integral a, const Integral& b) { return a += b; }

struct QuadratureOptions {
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  int max_subintervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of `g` over [lo, hi].
/// Either endpoint may be infinite; such intervals are mapped onto a finite
/// one by x = a + t / (1 - t). The integrand must be smooth on the open
/// interval; callers split at kinks. The reported error is the sum of
/// |K15 - G7| over the final partition.
Integral integrate_interval(const std::function<double(double)>& g, double lo, double hi,
                            const QuadratureOptions& options = {});

}  // namespace cvxtau
