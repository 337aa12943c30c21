#pragma once

// Static, spherically symmetric warped-product spacetimes
//
//   g = -F(r) dt^2 + dr^2 / F(r) + r^2 g_{S^{n-1}},   F = f^2,
//
// in coordinates (t, r, theta_1, ..., theta_{n-1}) with the round metric on
// the fibre written in standard hyperspherical angles. The two-form
// Q = r dr ^ dt is conformal Killing-Yano with divergence xi = -n d/dt for
// every member of this family.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "nullgeo/errors.hpp"

namespace nullgeo {

enum class SpacetimeKind { minkowski, schwarzschild, anti_de_sitter, de_sitter };

std::string to_string(SpacetimeKind kind);
SpacetimeKind spacetime_kind_from_string(const std::string& name);

struct Point {
  double t = 0.0;
  double r = 1.0;
  std::vector<double> angles;  // n-1 hyperspherical angles; for n = 3: (theta, phi)
};

using TangentVec = std::vector<double>;  // components in (d_t, d_r, d_theta_1, ...)

/// Dense square matrix, row-major.
struct Matrix {
  int dim = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int n) : dim(n), a(static_cast<std::size_t>(n) * n, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * dim + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * dim + j]; }
};

/// Christoffel symbols Gamma^a_{bc} at a point.
struct AmbientConnection {
  int dim = 0;
  std::vector<double> gamma;

  AmbientConnection() = default;
  explicit AmbientConnection(int n)
      : dim(n), gamma(static_cast<std::size_t>(n) * n * n, 0.0) {}
  double& operator()(int a, int b, int c) {
    return gamma[(static_cast<std::size_t>(a) * dim + b) * dim + c];
  }
  double operator()(int a, int b, int c) const {
    return gamma[(static_cast<std::size_t>(a) * dim + b) * dim + c];
  }
};

/// Riemann tensor with all indices down, R_{abcd} = <R(d_c, d_d) d_b, d_a>.
struct Riemann {
  int dim = 0;
  std::vector<double> r;

  explicit Riemann(int n) : dim(n), r(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  double& operator()(int a, int b, int c, int d) {
    return r[((static_cast<std::size_t>(a) * dim + b) * dim + c) * dim + d];
  }
  double operator()(int a, int b, int c, int d) const {
    return r[((static_cast<std::size_t>(a) * dim + b) * dim + c) * dim + d];
  }
};

namespace detail {
template <class T>
T int_power(const T& x, int k) {
  T out(1.0);
  for (int i = 0; i < k; ++i) out = out * x;
  return out;
}
}  // namespace detail

class Spacetime {
 public:
  static constexpr double kDefaultRadialMargin = 1e-6;

  static Spacetime minkowski(int n = 3);
  static Spacetime schwarzschild(double mass, int n = 3);
  static Spacetime anti_de_sitter(int n = 3);
  static Spacetime de_sitter(int n = 3);
  static Spacetime make(SpacetimeKind kind, int n, double mass);

  SpacetimeKind kind() const { return kind_; }
  int n() const { return n_; }
  int dim() const { return n_ + 1; }
  double mass() const { return mass_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  double radial_margin() const { return margin_; }
  void set_radial_margin(double eps) { margin_ = eps; }

  /// True exactly for Minkowski, (A)dS and Schwarzschild with m = 0.
  bool constant_curvature() const;
  /// Sectional curvature kappa for constant-curvature members (0 otherwise).
  double curvature() const;

  bool admissible(double r) const;
  void require_admissible(double r) const;
  void require_admissible(const Point& p) const;

  /// F(r) = f(r)^2 for any scalar type closed under + - * /.
  template <class T>
  T warp_sq(const T& r) const {
    switch (kind_) {
      case SpacetimeKind::minkowski:
        return T(1.0);
      case SpacetimeKind::schwarzschild:
        if (mass_ == 0.0) return T(1.0);
        return T(1.0) - T(2.0 * mass_) / detail::int_power(r, n_ - 2);
      case SpacetimeKind::anti_de_sitter:
        return T(1.0) + r * r;
      case SpacetimeKind::de_sitter:
        return T(1.0) - r * r;
    }
    return T(1.0);
  }
  double warp(double r) const;
  /// dF/dr
  double warp_sq_prime(double r) const;

  std::string describe() const;

 private:
  Spacetime(SpacetimeKind kind, int n, double mass);

  SpacetimeKind kind_;
  int n_;
  double mass_;
  double r_min_;
  double r_max_;
  double margin_ = kDefaultRadialMargin;
};

/// Diagonal of the metric at (r, angles); generic in the scalar type so the
/// frame construction can differentiate through it. angles.size() == n-1.
template <class T, class Angles>
std::vector<T> metric_diagonal(const Spacetime& st, const T& r, const Angles& angles) {
  const int n = st.n();
  std::vector<T> g(static_cast<std::size_t>(n) + 1);
  const T F = st.warp_sq(r);
  g[0] = -F;
  g[1] = T(1.0) / F;
  T s(1.0);
  for (int k = 0; k < n - 1; ++k) {
    g[k + 2] = r * r * s;
    using std::sin;
    const T sk = sin(angles[k]);
    s = s * sk * sk;
  }
  return g;
}

Matrix metric_at(const Spacetime& st, const Point& p);
AmbientConnection christoffels_at(const Spacetime& st, const Point& p);

/// Q = r dr ^ dt as a matrix Q_{ab}.
Matrix cky_form(const Spacetime& st, const Point& p);
/// xi = div Q = -n d/dt (contravariant components).
TangentVec cky_divergence_closed_form(const Spacetime& st);
/// (D_a Q)_{bc} from the closed-form connection.
std::vector<double> cky_covariant_derivative(const Spacetime& st, const Point& p);
/// Trace of D Q with the index raised: xi^c = g^{ab} (D_a Q)_{bc}, raised.
TangentVec cky_divergence_numeric(const Spacetime& st, const Point& p);

double inner(const Matrix& g, const TangentVec& x, const TangentVec& y);

/// (D_X Q)(Y,Z) + (D_Y Q)(X,Z) - (2/n)(<X,Y><xi,Z> - 1/2 <X,Z><xi,Y> - 1/2 <Y,Z><xi,X>).
double cky_residual(const Spacetime& st, const Point& p, const TangentVec& x, const TangentVec& y,
                    const TangentVec& z);

/// Same residual for Q' = r^k dr ^ dt (k = 1 reproduces cky_residual); used to
/// show that the identity is specific to the CKY form.
double cky_residual_for_power(const Spacetime& st, const Point& p, int k, const TangentVec& x,
                              const TangentVec& y, const TangentVec& z);

/// Riemann tensor from fourth-order central differences of christoffels_at.
Riemann riemann_at(const Spacetime& st, const Point& p, double step = 1e-3);

/// Riemann tensor from exact second derivatives of the metric (forward-mode AD).
/// Same convention as riemann_at.
Riemann riemann_exact(const Spacetime& st, const Point& p);

/// max |R_{abcd} - kappa (g_ac g_bd - g_ad g_bc)|.
double constant_curvature_residual(const Spacetime& st, const Point& p, double kappa);

}  // namespace nullgeo
