#include "nullgeo/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nullgeo/autodiff.hpp"

namespace nullgeo {

std::string to_string(SpacetimeKind kind) {
  switch (kind) {
    case SpacetimeKind::minkowski:
      return "minkowski";
    case SpacetimeKind::schwarzschild:
      return "schwarzschild";
    case SpacetimeKind::anti_de_sitter:
      return "anti_de_sitter";
    case SpacetimeKind::de_sitter:
      return "de_sitter";
  }
  return "unknown";
}

SpacetimeKind spacetime_kind_from_string(const std::string& name) {
  if (name == "minkowski") return SpacetimeKind::minkowski;
  if (name == "schwarzschild") return SpacetimeKind::schwarzschild;
  if (name == "anti_de_sitter") return SpacetimeKind::anti_de_sitter;
  if (name == "de_sitter") return SpacetimeKind::de_sitter;
  throw SchemaError("unknown spacetime kind '" + name +
                    "' (expected minkowski, schwarzschild, anti_de_sitter, de_sitter)");
}

Spacetime::Spacetime(SpacetimeKind kind, int n, double mass)
    : kind_(kind), n_(n), mass_(mass), r_min_(0.0), r_max_(INFINITY) {
  if (n < 2) throw PreconditionError("spacetime dimension n must be >= 2");
  if (mass < 0.0) throw PreconditionError("Schwarzschild mass must be nonnegative");
  if (kind == SpacetimeKind::schwarzschild && mass > 0.0) {
    if (n < 3) throw PreconditionError("Schwarzschild with m > 0 needs n >= 3");
    r_min_ = std::pow(2.0 * mass, 1.0 / (n - 2));
  }
  if (kind == SpacetimeKind::de_sitter) r_max_ = 1.0;
}

Spacetime Spacetime::minkowski(int n) { return Spacetime(SpacetimeKind::minkowski, n, 0.0); }
Spacetime Spacetime::schwarzschild(double mass, int n) {
  return Spacetime(SpacetimeKind::schwarzschild, n, mass);
}
Spacetime Spacetime::anti_de_sitter(int n) {
  return Spacetime(SpacetimeKind::anti_de_sitter, n, 0.0);
}
Spacetime Spacetime::de_sitter(int n) { return Spacetime(SpacetimeKind::de_sitter, n, 0.0); }

Spacetime Spacetime::make(SpacetimeKind kind, int n, double mass) {
  if (kind != SpacetimeKind::schwarzschild && mass != 0.0)
    throw SchemaError("mass is only meaningful for schwarzschild");
  return Spacetime(kind, n, mass);
}

bool Spacetime::constant_curvature() const {
  return kind_ != SpacetimeKind::schwarzschild || mass_ == 0.0;
}

double Spacetime::curvature() const {
  switch (kind_) {
    case SpacetimeKind::anti_de_sitter:
      return -1.0;
    case SpacetimeKind::de_sitter:
      return 1.0;
    default:
      return 0.0;
  }
}

bool Spacetime::admissible(double r) const {
  return std::isfinite(r) && r > r_min_ + margin_ && r < r_max_ - margin_;
}

void Spacetime::require_admissible(double r) const {
  if (!admissible(r)) {
    std::ostringstream os;
    os << "radius r = " << r << " outside the admissible domain (" << r_min_ << ", " << r_max_
       << ") of " << describe() << " with margin " << margin_;
    throw DomainError(os.str());
  }
}

void Spacetime::require_admissible(const Point& p) const {
  require_admissible(p.r);
  if (static_cast<int>(p.angles.size()) != n_ - 1)
    throw PreconditionError("point has the wrong number of angles for this spacetime");
  // every angle but the last azimuth must stay strictly inside (0, pi)
  for (int k = 0; k + 1 < n_ - 1; ++k) {
    if (!(p.angles[k] > 0.0 && p.angles[k] < M_PI))
      throw DomainError("polar angle outside (0, pi)");
  }
}

double Spacetime::warp(double r) const { return std::sqrt(warp_sq(r)); }

double Spacetime::warp_sq_prime(double r) const {
  switch (kind_) {
    case SpacetimeKind::minkowski:
      return 0.0;
    case SpacetimeKind::schwarzschild:
      if (mass_ == 0.0) return 0.0;
      return 2.0 * mass_ * (n_ - 2) / std::pow(r, n_ - 1);
    case SpacetimeKind::anti_de_sitter:
      return 2.0 * r;
    case SpacetimeKind::de_sitter:
      return -2.0 * r;
  }
  return 0.0;
}

std::string Spacetime::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(n=" << n_;
  if (kind_ == SpacetimeKind::schwarzschild) os << ", m=" << mass_;
  os << ")";
  return os.str();
}

Matrix metric_at(const Spacetime& st, const Point& p) {
  st.require_admissible(p);
  const auto diag = metric_diagonal(st, p.r, p.angles);
  Matrix g(st.dim());
  for (int a = 0; a < st.dim(); ++a) g(a, a) = diag[a];
  return g;
}

namespace {

// dg[c][b] = d_c g_bb for the diagonal warped metric.
std::vector<std::vector<double>> metric_diagonal_derivatives(const Spacetime& st,
                                                             const Point& p,
                                                             const std::vector<double>& g) {
  const int dim = st.dim();
  std::vector<std::vector<double>> dg(dim, std::vector<double>(dim, 0.0));
  const double F = st.warp_sq(p.r);
  const double Fp = st.warp_sq_prime(p.r);
  dg[1][0] = -Fp;
  dg[1][1] = -Fp / (F * F);
  for (int b = 2; b < dim; ++b) {
    dg[1][b] = 2.0 * g[b] / p.r;
    for (int i = 0; i < b - 2; ++i) {
      const double th = p.angles[i];
      dg[2 + i][b] = 2.0 * g[b] * std::cos(th) / std::sin(th);
    }
  }
  return dg;
}

}  // namespace

AmbientConnection christoffels_at(const Spacetime& st, const Point& p) {
  st.require_admissible(p);
  const int dim = st.dim();
  const auto g = metric_diagonal(st, p.r, p.angles);
  const auto dg = metric_diagonal_derivatives(st, p, g);
  AmbientConnection gam(dim);
  for (int a = 0; a < dim; ++a) {
    for (int c = 0; c < dim; ++c) {
      // Gamma^a_{ac} = Gamma^a_{ca} = 1/2 d_c g_aa / g_aa (covers a == c)
      const double v = 0.5 * dg[c][a] / g[a];
      gam(a, a, c) = v;
      gam(a, c, a) = v;
    }
    for (int b = 0; b < dim; ++b) {
      if (b == a) continue;
      gam(a, b, b) = -0.5 * dg[a][b] / g[a];
    }
  }
  return gam;
}

Matrix cky_form(const Spacetime& st, const Point& p) {
  Matrix q(st.dim());
  q(1, 0) = p.r;
  q(0, 1) = -p.r;
  return q;
}

TangentVec cky_divergence_closed_form(const Spacetime& st) {
  TangentVec xi(st.dim(), 0.0);
  xi[0] = -static_cast<double>(st.n());
  return xi;
}

namespace {

// (D_a Q)_{bc} for Q = r^k dr ^ dt.
std::vector<double> covariant_derivative_of_power_form(const Spacetime& st, const Point& p,
                                                       int k) {
  const int dim = st.dim();
  const AmbientConnection gam = christoffels_at(st, p);
  Matrix q(dim);
  q(1, 0) = std::pow(p.r, k);
  q(0, 1) = -q(1, 0);
  // only d_r Q_{rt} = -d_r Q_{tr} is nonzero
  const double dq = k * std::pow(p.r, k - 1);
  std::vector<double> dQ(static_cast<std::size_t>(dim) * dim * dim, 0.0);
  auto at = [&](int a, int b, int c) -> double& {
    return dQ[(static_cast<std::size_t>(a) * dim + b) * dim + c];
  };
  at(1, 1, 0) = dq;
  at(1, 0, 1) = -dq;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c) {
        double s = 0.0;
        for (int d = 0; d < dim; ++d) s += gam(d, a, b) * q(d, c) + gam(d, a, c) * q(b, d);
        at(a, b, c) -= s;
      }
  return dQ;
}

double cky_defect(const Spacetime& st, const Point& p, const std::vector<double>& dQ,
                  const TangentVec& x, const TangentVec& y, const TangentVec& z) {
  const int dim = st.dim();
  const Matrix g = metric_at(st, p);
  auto dq = [&](const TangentVec& u, const TangentVec& v, const TangentVec& w) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
          s += u[a] * v[b] * w[c] * dQ[(static_cast<std::size_t>(a) * dim + b) * dim + c];
    return s;
  };
  const TangentVec xi = cky_divergence_closed_form(st);
  const double n = st.n();
  const double rhs = (2.0 / n) * (inner(g, x, y) * inner(g, xi, z) -
                                  0.5 * inner(g, x, z) * inner(g, xi, y) -
                                  0.5 * inner(g, y, z) * inner(g, xi, x));
  return dq(x, y, z) + dq(y, x, z) - rhs;
}

}  // namespace

std::vector<double> cky_covariant_derivative(const Spacetime& st, const Point& p) {
  return covariant_derivative_of_power_form(st, p, 1);
}

TangentVec cky_divergence_numeric(const Spacetime& st, const Point& p) {
  const int dim = st.dim();
  const auto dQ = cky_covariant_derivative(st, p);
  const auto g = metric_diagonal(st, p.r, p.angles);
  TangentVec xi(dim, 0.0);
  for (int c = 0; c < dim; ++c) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += dQ[(static_cast<std::size_t>(a) * dim + a) * dim + c] / g[a];
    xi[c] = s / g[c];
  }
  return xi;
}

double inner(const Matrix& g, const TangentVec& x, const TangentVec& y) {
  double s = 0.0;
  for (int a = 0; a < g.dim; ++a)
    for (int b = 0; b < g.dim; ++b) s += g(a, b) * x[a] * y[b];
  return s;
}

double cky_residual(const Spacetime& st, const Point& p, const TangentVec& x,
                    const TangentVec& y, const TangentVec& z) {
  return cky_defect(st, p, cky_covariant_derivative(st, p), x, y, z);
}

double cky_residual_for_power(const Spacetime& st, const Point& p, int k, const TangentVec& x,
                              const TangentVec& y, const TangentVec& z) {
  return cky_defect(st, p, covariant_derivative_of_power_form(st, p, k), x, y, z);
}

Riemann riemann_at(const Spacetime& st, const Point& p, double step) {
  const int dim = st.dim();
  // d_e Gamma^a_{bc} by fourth-order central differences; Gamma is t-independent.
  std::vector<AmbientConnection> dgam(dim, AmbientConnection(dim));
  for (int e = 1; e < dim; ++e) {
    auto shifted = [&](double h) {
      Point q = p;
      if (e == 1)
        q.r += h;
      else
        q.angles[e - 2] += h;
      return christoffels_at(st, q);
    };
    const auto m2 = shifted(-2 * step), m1 = shifted(-step), p1 = shifted(step),
               p2 = shifted(2 * step);
    for (std::size_t i = 0; i < dgam[e].gamma.size(); ++i)
      dgam[e].gamma[i] =
          (m2.gamma[i] - 8.0 * m1.gamma[i] + 8.0 * p1.gamma[i] - p2.gamma[i]) / (12.0 * step);
  }
  const AmbientConnection gam = christoffels_at(st, p);
  const auto g = metric_diagonal(st, p.r, p.angles);
  Riemann up(dim);  // R^a_{bcd}
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d) {
          double v = dgam[c](a, d, b) - dgam[d](a, c, b);
          for (int m = 0; m < dim; ++m) v += gam(a, c, m) * gam(m, d, b) - gam(a, d, m) * gam(m, c, b);
          up(a, b, c, d) = v;
        }
  Riemann down(dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d) down(a, b, c, d) = g[a] * up(a, b, c, d);
  return down;
}

Riemann riemann_exact(const Spacetime& st, const Point& p) {
  using ad::HyperDual;
  const int dim = st.dim();
  // coordinate x_k: 0 = t, 1 = r, k >= 2 the angles
  auto eval = [&](int e, int f) {
    HyperDual r(p.r);
    std::vector<HyperDual> ang(p.angles.begin(), p.angles.end());
    auto seed = [&](int k, int slot) {
      if (k == 0) return;
      HyperDual& x = k == 1 ? r : ang[k - 2];
      x.g[slot] += 1.0;
    };
    seed(e, 0);
    seed(f, 1);
    return metric_diagonal(st, r, ang);
  };
  std::vector<double> G(dim);
  std::vector<std::vector<double>> D(dim, std::vector<double>(dim, 0.0));
  std::vector<std::vector<std::vector<double>>> DD(
      dim, std::vector<std::vector<double>>(dim, std::vector<double>(dim, 0.0)));
  for (int e = 1; e < dim; ++e)
    for (int f = e; f < dim; ++f) {
      const auto g = eval(e, f);
      for (int a = 0; a < dim; ++a) {
        G[a] = g[a].v;
        D[a][e] = g[a].g[0];
        D[a][f] = g[a].g[1];
        DD[a][e][f] = DD[a][f][e] = g[a].h[1];
      }
    }
  auto gam = [&](int a, int b, int c) {
    double v = 0.0;
    if (a == c) v += D[a][b];
    if (a == b) v += D[a][c];
    if (b == c) v -= D[b][a];
    return 0.5 * v / G[a];
  };
  auto dgam = [&](int e, int a, int b, int c) {  // d_e Gamma^a_{bc}
    double v = 0.0, dv = 0.0;
    if (a == c) v += D[a][b], dv += DD[a][b][e];
    if (a == b) v += D[a][c], dv += DD[a][c][e];
    if (b == c) v -= D[b][a], dv -= DD[b][a][e];
    return 0.5 * (dv / G[a] - v * D[a][e] / (G[a] * G[a]));
  };
  Riemann down(dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d) {
          double v = dgam(c, a, d, b) - dgam(d, a, c, b);
          for (int m = 0; m < dim; ++m) v += gam(a, c, m) * gam(m, d, b) - gam(a, d, m) * gam(m, c, b);
          down(a, b, c, d) = G[a] * v;
        }
  return down;
}

double constant_curvature_residual(const Spacetime& st, const Point& p, double kappa) {
  const int dim = st.dim();
  const Riemann R = riemann_at(st, p);
  const auto g = metric_diagonal(st, p.r, p.angles);
  auto gm = [&](int i, int j) { return i == j ? g[i] : 0.0; };
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c)
        for (int d = 0; d < dim; ++d) {
          const double model = kappa * (gm(a, c) * gm(b, d) - gm(a, d) * gm(b, c));
          worst = std::max(worst, std::abs(R(a, b, c, d) - model));
        }
  return worst;
}

}  // namespace nullgeo
