#pragma once

// Mixed higher-order mean curvatures of a pair of symmetric forms (chi, chibar)
// relative to a positive-definite sigma:
//
//   det(sigma + y chi + ybar chibar) / det(sigma)
//       = sum_{r+s <= d} (r+s)!/(r! s!) y^r ybar^s P_{r,s},
//
// H_{r,s} = P_{r,s} / C(d, r+s), and the Newton tensors are the entrywise
// derivatives T^{ab}_{r,s} = dP_{r,s}/dchi_{ab}, Tbar^{ab}_{r,s} = dP_{r,s}/dchibar_{ab}
// (entries treated as independent, so a symmetric perturbation of chi_{12}
// moves P by (T^{12} + T^{21}) * step).
//
// Everything is templated on the scalar so it can run in exact rational arithmetic.

#include <cstdint>
#include <vector>

#include "nullgeo/errors.hpp"

namespace nullgeo {

template <class T>
struct CurvTuple {
  int dim = 0;
  std::vector<T> sigma;   // row-major dim x dim
  std::vector<T> chi;
  std::vector<T> chibar;
};

/// Bivariate polynomial sum c[i][j] y^i ybar^j with i + j <= deg.
template <class T>
struct BiPoly {
  int deg = 0;
  std::vector<T> c;  // (deg+1)^2

  BiPoly() = default;
  explicit BiPoly(int d) : deg(d), c(static_cast<std::size_t>(d + 1) * (d + 1), T(0)) {}
  T& at(int i, int j) { return c[static_cast<std::size_t>(i) * (deg + 1) + j]; }
  const T& at(int i, int j) const { return c[static_cast<std::size_t>(i) * (deg + 1) + j]; }
  T coeff(int i, int j) const {
    if (i < 0 || j < 0 || i > deg || j > deg) return T(0);
    return at(i, j);
  }
};

template <class T>
struct MixedCurvatures {
  int dim = 0;
  std::vector<T> P;  // P[r * (dim+1) + s], valid for r + s <= dim
  std::vector<T> H;
  T p(int r, int s) const { return P[static_cast<std::size_t>(r) * (dim + 1) + s]; }
  T h(int r, int s) const { return H[static_cast<std::size_t>(r) * (dim + 1) + s]; }
};

namespace algebra_detail {

template <class T>
T factorial(int k) {
  T out(1);
  for (int i = 2; i <= k; ++i) out = out * T(i);
  return out;
}

template <class T>
T binomial(int n, int k) {
  return factorial<T>(n) / (factorial<T>(k) * factorial<T>(n - k));
}

inline int popcount_above(std::uint32_t mask, int j) {
  return __builtin_popcount(mask >> (j + 1));
}

// det of the submatrix (rows, cols) of M = S + y A + ybar B as a polynomial.
template <class T>
BiPoly<T> det_poly(int n, const std::vector<T>& S, const std::vector<T>& A, const std::vector<T>& B,
                   const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  const int deg = k;
  std::vector<BiPoly<T>> dp(std::size_t(1) << k, BiPoly<T>(deg));
  std::vector<bool> live(std::size_t(1) << k, false);
  dp[0].at(0, 0) = T(1);
  live[0] = true;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    if (!live[mask]) continue;
    const int row = __builtin_popcount(mask);
    if (row == k) continue;
    for (int j = 0; j < k; ++j) {
      if (mask & (1u << j)) continue;
      const std::size_t e = static_cast<std::size_t>(rows[row]) * n + cols[j];
      const T s = S[e], a = A[e], b = B[e];
      const bool neg = popcount_above(mask, j) % 2 == 1;
      BiPoly<T>& dst = dp[mask | (1u << j)];
      live[mask | (1u << j)] = true;
      const BiPoly<T>& src = dp[mask];
      for (int i1 = 0; i1 <= row; ++i1)
        for (int i2 = 0; i1 + i2 <= row; ++i2) {
          const T v = src.at(i1, i2);
          if (v == T(0)) continue;
          const T sv = neg ? T(0) - v : v;
          dst.at(i1, i2) = dst.at(i1, i2) + sv * s;
          dst.at(i1 + 1, i2) = dst.at(i1 + 1, i2) + sv * a;
          dst.at(i1, i2 + 1) = dst.at(i1, i2 + 1) + sv * b;
        }
    }
  }
  return dp[(1u << k) - 1];
}

inline std::vector<int> iota_except(int n, int skip) {
  std::vector<int> v;
  for (int i = 0; i < n; ++i)
    if (i != skip) v.push_back(i);
  return v;
}

template <class T>
void validate(const CurvTuple<T>& ct) {
  const std::size_t m = static_cast<std::size_t>(ct.dim) * ct.dim;
  if (ct.dim < 1 || ct.dim > 8) throw PreconditionError("curvature tuple dimension must be in 1..8");
  if (ct.sigma.size() != m || ct.chi.size() != m || ct.chibar.size() != m)
    throw PreconditionError("curvature tuple matrices have the wrong size");
}

}  // namespace algebra_detail

/// det(sigma + y chi + ybar chibar) as an exact polynomial.
template <class T>
BiPoly<T> expansion_polynomial(const CurvTuple<T>& ct) {
  algebra_detail::validate(ct);
  const auto all = algebra_detail::iota_except(ct.dim, -1);
  return algebra_detail::det_poly(ct.dim, ct.sigma, ct.chi, ct.chibar, all, all);
}

template <class T>
MixedCurvatures<T> mixed_curvatures(const CurvTuple<T>& ct) {
  using namespace algebra_detail;
  const BiPoly<T> poly = expansion_polynomial(ct);
  const T det_sigma = poly.at(0, 0);
  if (det_sigma == T(0)) throw PreconditionError("sigma is singular");
  const int d = ct.dim;
  MixedCurvatures<T> out;
  out.dim = d;
  out.P.assign(static_cast<std::size_t>(d + 1) * (d + 1), T(0));
  out.H = out.P;
  for (int r = 0; r <= d; ++r)
    for (int s = 0; r + s <= d; ++s) {
      const T p = poly.at(r, s) / det_sigma * factorial<T>(r) * factorial<T>(s) / factorial<T>(r + s);
      out.P[static_cast<std::size_t>(r) * (d + 1) + s] = p;
      out.H[static_cast<std::size_t>(r) * (d + 1) + s] = p / binomial<T>(d, r + s);
    }
  return out;
}

template <class T>
struct NewtonPair {
  int dim = 0;
  std::vector<T> T_up;     // T^{ab}_{r,s}, row-major
  std::vector<T> Tbar_up;  // Tbar^{ab}_{r,s}
};

/// Both Newton tensors from the cofactor polynomials of sigma + y chi + ybar chibar.
template <class T>
NewtonPair<T> newton_tensors(const CurvTuple<T>& ct, int r, int s) {
  using namespace algebra_detail;
  validate(ct);
  const int d = ct.dim;
  if (r < 0 || s < 0 || r + s > d) throw PreconditionError("Newton tensor needs 0 <= r + s <= dim");
  const auto all = iota_except(d, -1);
  const T det_sigma = det_poly(d, ct.sigma, ct.chi, ct.chibar, all, all).at(0, 0);
  if (det_sigma == T(0)) throw PreconditionError("sigma is singular");
  const T norm = factorial<T>(r) * factorial<T>(s) / factorial<T>(r + s) / det_sigma;
  NewtonPair<T> out;
  out.dim = d;
  out.T_up.assign(static_cast<std::size_t>(d) * d, T(0));
  out.Tbar_up = out.T_up;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      BiPoly<T> cof(0);
      if (d == 1) {
        cof.at(0, 0) = T(1);
      } else {
        cof = det_poly(d, ct.sigma, ct.chi, ct.chibar, iota_except(d, a), iota_except(d, b));
      }
      const bool neg = (a + b) % 2 == 1;
      auto sgn = [&](const T& v) { return neg ? T(0) - v : v; };
      const std::size_t e = static_cast<std::size_t>(a) * d + b;
      if (r >= 1) out.T_up[e] = sgn(cof.coeff(r - 1, s)) * norm;
      if (s >= 1) out.Tbar_up[e] = sgn(cof.coeff(r, s - 1)) * norm;
    }
  return out;
}

/// Elementary symmetric functions sigma_0..sigma_d of a list.
std::vector<double> elementary_symmetric(const std::vector<double>& lambda);

/// Strict membership sigma_1..sigma_k > 0.
bool gamma_cone_member(const std::vector<double>& eigenvalues, int k);
/// Same for the sigma-relative eigenvalues of a symmetric matrix a.
bool gamma_cone_member(const std::vector<double>& sigma, const std::vector<double>& a, int dim, int k);
/// Eigenvalues of sigma^{-1} a (generalized symmetric problem), ascending.
std::vector<double> relative_eigenvalues(const std::vector<double>& sigma, const std::vector<double>& a,
                                         int dim);

struct GapResult {
  double gap = 0.0;
  bool precondition_ok = false;  // chi and chibar in Gamma_{r+s-1}
};

/// H_{r-1,s}^2 - H_{r,s} H_{r-2,s}; r >= 2.
GapResult newton_maclaurin_gap(const CurvTuple<double>& ct, int r, int s);

}  // namespace nullgeo
