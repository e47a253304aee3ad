#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "mirrorgeo/types.hpp"

namespace mirrorgeo {

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sign_of(double x) { return x >= 0.0 ? 1.0 : -1.0; }

/// Plain p-norm. Uses scaling by the max entry so large exponents do not overflow.
inline double lp_norm(std::span<const double> v, Exponent p) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (p.is_infinite() || m == 0.0) return m;
  const double pv = p.value();
  if (pv == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  if (pv == 2.0) {
    double s = 0.0;
    for (double x : v) s += (x / m) * (x / m);
    return m * std::sqrt(s);
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / m, pv);
  return m * std::pow(s, 1.0 / pv);
}

inline double norm2(std::span<const double> v) { return lp_norm(v, Exponent(2.0)); }

inline Vec add(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "add");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "sub");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vec scaled(std::span<const double> a, double c) {
  Vec out(a.begin(), a.end());
  for (double& x : out) x *= c;
  return out;
}

/// y += c * x
inline void axpy(double c, std::span<const double> x, std::span<double> y) {
  require_same_dim(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// sign(x_i) |x_i|^e, the coordinate-wise power map used by Lp duality maps.
inline Vec signed_power(std::span<const double> x, double e) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] == 0.0 ? 0.0 : sign_of(x[i]) * std::pow(std::abs(x[i]), e);
  }
  return out;
}

}  // namespace mirrorgeo
