#pragma once

#include <cmath>

namespace kvplate {

/// Value with first and second derivative of a scalar function of one variable.
struct Jet1 {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

namespace detail {
// exp(-1/s) and its derivatives; flushed to zero below s = 0.01 where the
// value is ~1e-44.
inline Jet1 flat_exp(double s) {
  if (s < 1e-2) return {};
  const double e = std::exp(-1.0 / s);
  const double s2 = s * s;
  return {e, e / s2, e * (1.0 - 2.0 * s) / (s2 * s2)};
}
}  // namespace detail

/// C-infinity transition from 0 (t <= 0) to 1 (t >= 1).
inline Jet1 smooth_step(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  const Jet1 a = detail::flat_exp(t);
  const Jet1 f = detail::flat_exp(1.0 - t);
  const double b = f.value, bp = -f.d1, bpp = f.d2;
  const double s = a.value + b;
  const double sp = a.d1 + bp;
  const double n = a.d1 * b - a.value * bp;
  const double np = a.d2 * b - a.value * bpp;
  return {a.value / s, n / (s * s), (np * s - 2.0 * n * sp) / (s * s * s)};
}

/// Even cutoff in z: 1 for |z| <= inner, 0 for |z| >= inner + taper.
inline Jet1 plateau_cutoff(double z, double inner, double taper) {
  const double az = std::abs(z);
  const Jet1 st = smooth_step((az - inner) / taper);
  const double sign = z < 0.0 ? -1.0 : 1.0;
  return {1.0 - st.value, -st.d1 / taper * sign, -st.d2 / (taper * taper)};
}

}  // namespace kvplate
