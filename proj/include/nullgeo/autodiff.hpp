#pragma once

// Forward-mode number types over the two surface parameters (theta, phi).
//
//   HyperDual : truncated second-order Taylor polynomial, value + gradient +
//               symmetric Hessian (the mixed partial is stored once).
//   Dual2     : first-order, value + gradient.
//
// Both are closed under the elementary operations used by the expression
// language and by the warped-product metric.

#include <array>
#include <cmath>

namespace nullgeo::ad {

struct HyperDual {
  double v = 0.0;
  std::array<double, 2> g{0.0, 0.0};
  // h[0] = d2/dtheta2, h[1] = d2/dtheta dphi, h[2] = d2/dphi2
  std::array<double, 3> h{0.0, 0.0, 0.0};

  HyperDual() = default;
  HyperDual(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static HyperDual variable(double value, int direction) {
    HyperDual x(value);
    x.g[direction] = 1.0;
    return x;
  }

  double hess(int a, int b) const { return h[a + b]; }

  // Chain rule for a scalar function with value f0, slope f1, curvature f2.
  HyperDual chain(double f0, double f1, double f2) const {
    HyperDual r(f0);
    r.g = {f1 * g[0], f1 * g[1]};
    r.h = {f1 * h[0] + f2 * g[0] * g[0], f1 * h[1] + f2 * g[0] * g[1],
           f1 * h[2] + f2 * g[1] * g[1]};
    return r;
  }

  HyperDual& operator+=(const HyperDual& o) {
    v += o.v;
    for (int i = 0; i < 2; ++i) g[i] += o.g[i];
    for (int i = 0; i < 3; ++i) h[i] += o.h[i];
    return *this;
  }
  HyperDual& operator-=(const HyperDual& o) {
    v -= o.v;
    for (int i = 0; i < 2; ++i) g[i] -= o.g[i];
    for (int i = 0; i < 3; ++i) h[i] -= o.h[i];
    return *this;
  }
  HyperDual& operator*=(const HyperDual& o) {
    HyperDual r(v * o.v);
    r.g = {v * o.g[0] + g[0] * o.v, v * o.g[1] + g[1] * o.v};
    r.h = {v * o.h[0] + 2.0 * g[0] * o.g[0] + h[0] * o.v,
           v * o.h[1] + g[0] * o.g[1] + g[1] * o.g[0] + h[1] * o.v,
           v * o.h[2] + 2.0 * g[1] * o.g[1] + h[2] * o.v};
    *this = r;
    return *this;
  }
  HyperDual& operator/=(const HyperDual& o) {
    const double inv = 1.0 / o.v;
    *this *= o.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
    return *this;
  }
};

inline HyperDual operator-(HyperDual a) {
  a.v = -a.v;
  for (auto& x : a.g) x = -x;
  for (auto& x : a.h) x = -x;
  return a;
}
inline HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
inline HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
inline HyperDual operator*(HyperDual a, const HyperDual& b) { return a *= b; }
inline HyperDual operator/(HyperDual a, const HyperDual& b) { return a /= b; }

inline HyperDual sin(const HyperDual& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return x.chain(s, c, -s);
}
inline HyperDual cos(const HyperDual& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return x.chain(c, -s, -c);
}
inline HyperDual exp(const HyperDual& x) {
  const double e = std::exp(x.v);
  return x.chain(e, e, e);
}
inline HyperDual log(const HyperDual& x) {
  const double inv = 1.0 / x.v;
  return x.chain(std::log(x.v), inv, -inv * inv);
}
inline HyperDual sqrt(const HyperDual& x) {
  const double s = std::sqrt(x.v);
  return x.chain(s, 0.5 / s, -0.25 / (s * x.v));
}
inline HyperDual ipow(const HyperDual& x, int k) {
  if (k == 0) return HyperDual(1.0);
  if (k == 1) return x;
  const double p2 = std::pow(x.v, k - 2);
  return x.chain(p2 * x.v * x.v, k * p2 * x.v, k * (k - 1) * p2);
}

struct Dual2 {
  double v = 0.0;
  std::array<double, 2> g{0.0, 0.0};

  Dual2() = default;
  Dual2(double value) : v(value) {}  // NOLINT
  Dual2(double value, double g0, double g1) : v(value), g{g0, g1} {}

  Dual2 chain(double f0, double f1) const { return {f0, f1 * g[0], f1 * g[1]}; }

  Dual2& operator+=(const Dual2& o) {
    v += o.v;
    g[0] += o.g[0];
    g[1] += o.g[1];
    return *this;
  }
  Dual2& operator-=(const Dual2& o) {
    v -= o.v;
    g[0] -= o.g[0];
    g[1] -= o.g[1];
    return *this;
  }
  Dual2& operator*=(const Dual2& o) {
    *this = {v * o.v, v * o.g[0] + g[0] * o.v, v * o.g[1] + g[1] * o.v};
    return *this;
  }
  Dual2& operator/=(const Dual2& o) {
    const double inv = 1.0 / o.v;
    *this = {v * inv, (g[0] - v * inv * o.g[0]) * inv, (g[1] - v * inv * o.g[1]) * inv};
    return *this;
  }
};

inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.g[0], -a.g[1]}; }
inline Dual2 operator+(Dual2 a, const Dual2& b) { return a += b; }
inline Dual2 operator-(Dual2 a, const Dual2& b) { return a -= b; }
inline Dual2 operator*(Dual2 a, const Dual2& b) { return a *= b; }
inline Dual2 operator/(Dual2 a, const Dual2& b) { return a /= b; }
inline Dual2 sin(const Dual2& x) { return x.chain(std::sin(x.v), std::cos(x.v)); }
inline Dual2 cos(const Dual2& x) { return x.chain(std::cos(x.v), -std::sin(x.v)); }
inline Dual2 sqrt(const Dual2& x) {
  const double s = std::sqrt(x.v);
  return x.chain(s, 0.5 / s);
}
inline Dual2 log(const Dual2& x) { return x.chain(std::log(x.v), 1.0 / x.v); }
inline Dual2 exp(const Dual2& x) {
  const double e = std::exp(x.v);
  return x.chain(e, e);
}

inline double value(double x) { return x; }
inline double value(const Dual2& x) { return x.v; }
inline double value(const HyperDual& x) { return x.v; }

}  // namespace nullgeo::ad
