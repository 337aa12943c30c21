#include "nullgeo/extrinsic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <cmath>
#include <limits>

namespace nullgeo {

const char* to_string(HFrameStatus s) {
  switch (s) {
    case HFrameStatus::ok:
      return "ok";
    case HFrameStatus::degenerate:
      return "mean curvature not spacelike/degenerate";
    case HFrameStatus::past_directed:
      return "mean-curvature null frame not future directed";
  }
  return "?";
}

double inner(const Vec4& g, const Vec4& x, const Vec4& y) {
  return g[0] * x[0] * y[0] + g[1] * x[1] * y[1] + g[2] * x[2] * y[2] + g[3] * x[3] * y[3];
}

double Q(double r, const Vec4& x, const Vec4& y) { return r * (x[1] * y[0] - x[0] * y[1]); }

Sym2 raise_both(const Sym2& si, const Sym2& m) {
  // (si m si)
  const double a00 = si[0] * m[0] + si[1] * m[1], a01 = si[0] * m[1] + si[1] * m[2];
  const double a10 = si[1] * m[0] + si[2] * m[1], a11 = si[1] * m[1] + si[2] * m[2];
  return {a00 * si[0] + a01 * si[1], a00 * si[1] + a01 * si[2], a10 * si[1] + a11 * si[2]};
}

std::array<std::array<double, 2>, 2> mixed(const Sym2& si, const Sym2& m) {
  const double mm[2][2] = {{m[0], m[1]}, {m[1], m[2]}};
  const double ss[2][2] = {{si[0], si[1]}, {si[1], si[2]}};
  std::array<std::array<double, 2>, 2> out{};
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) out[a][c] = mm[a][0] * ss[0][c] + mm[a][1] * ss[1][c];
  return out;
}

namespace {

template <class T>
using TVec = std::array<T, 4>;

template <class T>
T tinner(const std::vector<T>& g, const TVec<T>& x, const TVec<T>& y) {
  return g[0] * x[0] * y[0] + g[1] * x[1] * y[1] + g[2] * x[2] * y[2] + g[3] * x[3] * y[3];
}

// Gram-Schmidt normals from d/dt (timelike) and d/dr, for a spacelike tangent plane.
template <class T>
void gs_normals(const Spacetime& st, const T& r, const std::array<T, 2>& angles,
                const std::array<TVec<T>, 2>& X, TVec<T>& e_n, TVec<T>& e_np1) {
  const std::vector<T> g = metric_diagonal(st, r, angles);
  const T s00 = tinner(g, X[0], X[0]), s01 = tinner(g, X[0], X[1]), s11 = tinner(g, X[1], X[1]);
  const T det = s00 * s11 - s01 * s01;
  const T i00 = s11 / det, i01 = T(0.0) - s01 / det, i11 = s00 / det;
  auto tangential_removed = [&](const TVec<T>& v) {
    const T p0 = tinner(g, v, X[0]), p1 = tinner(g, v, X[1]);
    const T c0 = i00 * p0 + i01 * p1, c1 = i01 * p0 + i11 * p1;
    TVec<T> out;
    for (int k = 0; k < 4; ++k) out[k] = v[k] - c0 * X[0][k] - c1 * X[1][k];
    return out;
  };
  using std::sqrt;
  using ad::sqrt;
  const TVec<T> dt{T(1.0), T(0.0), T(0.0), T(0.0)};
  const TVec<T> dr{T(0.0), T(1.0), T(0.0), T(0.0)};
  const TVec<T> n1 = tangential_removed(dt);
  const T n1n = sqrt(T(0.0) - tinner(g, n1, n1));
  for (int k = 0; k < 4; ++k) e_np1[k] = n1[k] / n1n;
  TVec<T> m = tangential_removed(dr);
  const T me = tinner(g, m, e_np1);
  for (int k = 0; k < 4; ++k) m[k] = m[k] + me * e_np1[k];
  const T mn = sqrt(tinner(g, m, m));
  for (int k = 0; k < 4; ++k) e_n[k] = m[k] / mn;
}

Vec4 scaled(const Vec4& v, double c) { return {c * v[0], c * v[1], c * v[2], c * v[3]}; }
Vec4 add(const Vec4& a, const Vec4& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]}; }
Vec4 sub(const Vec4& a, const Vec4& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]}; }

Vec4 connection_term(const AmbientConnection& gam, const Vec4& x, const Vec4& y) {
  Vec4 out{};
  for (int c = 0; c < 4; ++c) {
    double s = 0.0;
    for (int d = 0; d < 4; ++d)
      for (int e = 0; e < 4; ++e) s += gam(c, d, e) * x[d] * y[e];
    out[c] = s;
  }
  return out;
}

}  // namespace

FrameData frame_at(const Spacetime& st, const Jet2& jet, const FrameOptions& opts) {
  if (st.n() != 3) throw PreconditionError("surface geometry is implemented for n = 3 only");
  FrameData fd;
  fd.position = jet.position;
  st.require_admissible(fd.position);
  const double r = fd.position.r;
  const auto gd = metric_diagonal(st, r, fd.position.angles);
  for (int k = 0; k < 4; ++k) fd.g[k] = gd[k];
  const AmbientConnection gam = christoffels_at(st, fd.position);
  for (int a = 0; a < 2; ++a) fd.X[a] = jet.d1[a];

  IntrinsicGeometry& ig = fd.geom;
  ig.sigma = {inner(fd.g, fd.X[0], fd.X[0]), inner(fd.g, fd.X[0], fd.X[1]),
              inner(fd.g, fd.X[1], fd.X[1])};
  const double det = ig.sigma[0] * ig.sigma[2] - ig.sigma[1] * ig.sigma[1];
  if (!(ig.sigma[0] > 0.0 && det > 0.0))
    throw PreconditionError("induced metric is not positive definite (surface not spacelike)");
  ig.sigma_inv = {ig.sigma[2] / det, -ig.sigma[1] / det, ig.sigma[0] / det};
  ig.area_density = std::sqrt(det);

  // Normal frame, with first derivatives along the surface in one pass.
  using ad::Dual2;
  const Dual2 rr(r, jet.d1[0][1], jet.d1[1][1]);
  const std::array<Dual2, 2> ang{Dual2(fd.position.angles[0], 1.0, 0.0),
                                 Dual2(fd.position.angles[1], 0.0, 1.0)};
  std::array<TVec<Dual2>, 2> Xd;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 4; ++c) Xd[b][c] = Dual2(jet.d1[b][c], jet.d2[0][b][c], jet.d2[1][b][c]);
  TVec<Dual2> en, enp1;
  gs_normals(st, rr, ang, Xd, en, enp1);
  for (int c = 0; c < 4; ++c) {
    fd.e_n[c] = en[c].v;
    fd.e_np1[c] = enp1[c].v;
  }
  for (int a = 0; a < 2; ++a) {
    Vec4 de{};
    for (int c = 0; c < 4; ++c) de[c] = en[c].g[a];
    const Vec4 D = add(de, connection_term(gam, fd.X[a], fd.e_n));
    fd.beta[a] = inner(fd.g, D, fd.e_np1);
  }

  // Second fundamental form, induced Christoffels.
  Vec4 V[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) {
      V[a][b] = add(jet.d2[a][b], connection_term(gam, fd.X[a], fd.X[b]));
      V[b][a] = V[a][b];
    }
  const double si[2][2] = {{ig.sigma_inv[0], ig.sigma_inv[1]}, {ig.sigma_inv[1], ig.sigma_inv[2]}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double an = inner(fd.g, V[a][b], fd.e_n), at = inner(fd.g, V[a][b], fd.e_np1);
      fd.II[a][b] = sub(scaled(fd.e_n, an), scaled(fd.e_np1, at));
      const double p0 = inner(fd.g, V[a][b], fd.X[0]), p1 = inner(fd.g, V[a][b], fd.X[1]);
      for (int c = 0; c < 2; ++c) ig.gamma[c][a][b] = si[c][0] * p0 + si[c][1] * p1;
    }

  // sigma-orthonormal tangent pair
  const Vec4 e1 = scaled(fd.X[0], 1.0 / std::sqrt(ig.sigma[0]));
  Vec4 e2 = sub(fd.X[1], scaled(e1, inner(fd.g, fd.X[1], e1)));
  e2 = scaled(e2, 1.0 / std::sqrt(inner(fd.g, e2, e2)));
  fd.e_tan = {e1, e2};

  fd.H = {};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) fd.H = add(fd.H, scaled(fd.II[a][b], si[a][b]));
  fd.h_n = inner(fd.g, fd.H, fd.e_n);
  fd.h_np1 = -inner(fd.g, fd.H, fd.e_np1);
  fd.J = sub(scaled(fd.e_n, -fd.h_np1), scaled(fd.e_np1, fd.h_n));
  fd.normH2 = (fd.h_n - fd.h_np1) * (fd.h_n + fd.h_np1);
  fd.normH = std::sqrt(std::max(fd.normH2, 0.0));

  fd.ell = add(fd.e_np1, fd.e_n);
  fd.ellbar = sub(fd.e_np1, fd.e_n);
  auto contract = [&](const Vec4& nvec) {
    return Sym2{-inner(fd.g, nvec, fd.II[0][0]), -inner(fd.g, nvec, fd.II[0][1]),
                -inner(fd.g, nvec, fd.II[1][1])};
  };
  fd.chi_gs = contract(fd.ell);
  fd.chibar_gs = contract(fd.ellbar);

  if (!(fd.normH2 > 0.0) || fd.normH < opts.eps_H) {
    fd.hstatus = HFrameStatus::degenerate;
  } else if (!(fd.h_n < -std::abs(fd.h_np1))) {
    fd.hstatus = HFrameStatus::past_directed;
  } else {
    fd.hstatus = HFrameStatus::ok;
    const double ew = -(fd.h_n + fd.h_np1) / fd.normH;
    fd.w = std::log(ew);
    fd.L = scaled(fd.ell, ew);
    fd.Lbar = scaled(fd.ellbar, 1.0 / ew);
    for (int k = 0; k < 3; ++k) {
      fd.chi[k] = ew * fd.chi_gs[k];
      fd.chibar[k] = fd.chibar_gs[k] / ew;
    }
  }
  return fd;
}

Covector beta_by_differences(const Spacetime& st, const SurfaceSpec& spec, double theta,
                             double phi, double step) {
  const FrameData c = frame_at(st, eval_jet2(spec, theta, phi));
  const AmbientConnection gam = christoffels_at(st, c.position);
  Covector out{};
  for (int a = 0; a < 2; ++a) {
    auto en = [&](double h) {
      return frame_at(st, eval_jet2(spec, theta + (a == 0 ? h : 0.0), phi + (a == 1 ? h : 0.0))).e_n;
    };
    const Vec4 m2 = en(-2 * step), m1 = en(-step), p1 = en(step), p2 = en(2 * step);
    Vec4 de{};
    for (int k = 0; k < 4; ++k) de[k] = (m2[k] - 8.0 * m1[k] + 8.0 * p1[k] - p2[k]) / (12.0 * step);
    out[a] = inner(c.g, add(de, connection_term(gam, c.X[a], c.e_n)), c.e_np1);
  }
  return out;
}

double shear_deficit(const FrameData& fd, NullDirection which) {
  const bool hg = fd.hstatus == HFrameStatus::ok;
  const Sym2& m = which == NullDirection::incoming ? (hg ? fd.chibar : fd.chibar_gs)
                                                   : (hg ? fd.chi : fd.chi_gs);
  const Sym2& s = fd.geom.sigma;
  const Sym2& si = fd.geom.sigma_inv;
  const double tr = si[0] * m[0] + 2.0 * si[1] * m[1] + si[2] * m[2];
  const Sym2 d{m[0] - 0.5 * tr * s[0], m[1] - 0.5 * tr * s[1], m[2] - 0.5 * tr * s[2]};
  const auto a = mixed(si, d);  // (d sigma^{-1}); |d|^2 = tr(a a)
  const double n2 = a[0][0] * a[0][0] + 2.0 * a[0][1] * a[1][0] + a[1][1] * a[1][1];
  return std::sqrt(std::max(n2, 0.0));
}

SurfaceData build_surface(const Spacetime& st, const SurfaceSpec& spec, const GridPtr& grid,
                          const FrameOptions& opts) {
  SurfaceData s{st, spec, grid, opts, SurfaceField<FrameData>(grid), GeometryField(grid),
                CovectorField(grid), false, "", CovectorField(), ScalarField()};
  const GridSpec& g = *grid;
  parallel_for(g.size(), [&](int k) {
    const int i = k / g.n_phi(), j = k % g.n_phi();
    s.frames[k] = frame_at(st, eval_jet2(spec, g.theta(i), g.phi(j)), opts);
  });
  s.h_ok = true;
  for (int k = 0; k < g.size(); ++k) {
    s.geometry[k] = s.frames[k].geom;
    s.beta[k] = s.frames[k].beta;
    if (s.h_ok && s.frames[k].hstatus != HFrameStatus::ok) {
      s.h_ok = false;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s at theta = %.6f, phi = %.6f", to_string(s.frames[k].hstatus),
                    s.frames[k].position.angles[0], s.frames[k].position.angles[1]);
      s.h_diagnostic = buf;
    }
  }
  if (s.h_ok) {
    s.w = ScalarField(grid);
    for (int k = 0; k < g.size(); ++k) s.w[k] = s.frames[k].w;
    const CovectorField dw = differential(s.w);
    s.alphaH = CovectorField(grid);
    for (int k = 0; k < g.size(); ++k) s.alphaH[k] = {s.beta[k][0] - dw[k][0], s.beta[k][1] - dw[k][1]};
  }
  return s;
}

void require_h_frame(const SurfaceData& s) {
  if (!s.h_ok) throw PreconditionError(s.h_diagnostic);
}

ScalarField field_of(const SurfaceData& s, double (*fn)(const FrameData&)) {
  ScalarField out(s.grid);
  for (int k = 0; k < out.size(); ++k) out[k] = fn(s.frames[k]);
  return out;
}

namespace {

std::array<double, 3> unit_p(double th, double ph) {
  return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
}
std::array<double, 3> p_theta(double th, double ph) {
  return {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
}
std::array<double, 3> p_phi(double th, double ph) {
  return {-std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0};
}
double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace

Lifted lift(const FrameData& fd, const Vec4& v) {
  const double th = fd.position.angles[0], ph = fd.position.angles[1];
  const auto pt = p_theta(th, ph), pp = p_phi(th, ph);
  Lifted out;
  out.vt = v[0];
  out.vr = v[1];
  for (int k = 0; k < 3; ++k) out.w[k] = v[2] * pt[k] + v[3] * pp[k];
  return out;
}

double lifted_inner(const Spacetime& st, const FrameData& fd, const Lifted& a, const Lifted& b) {
  const double r = fd.position.r;
  const double F = st.warp_sq(r);
  return -F * a.vt * b.vt + a.vr * b.vr / F + r * r * dot3(a.w, b.w);
}

std::array<SurfaceField<Lifted>, 2> lifted_derivative(const SurfaceData& s,
                                                      const SurfaceField<Lifted>& v) {
  const GridSpec& g = *s.grid;
  const int n = g.size();
  std::array<std::vector<double>, 5> comp;
  for (auto& c : comp) c.resize(n);
  for (int k = 0; k < n; ++k) {
    comp[0][k] = v[k].vt;
    comp[1][k] = v[k].vr;
    for (int q = 0; q < 3; ++q) comp[2 + q][k] = v[k].w[q];
  }
  std::array<std::array<std::vector<double>, 5>, 2> d;
  for (int c = 0; c < 5; ++c) {
    d[0][c] = d_theta(g, comp[c], +1);
    d[1][c] = d_phi(g, comp[c]);
  }
  std::array<SurfaceField<Lifted>, 2> out{SurfaceField<Lifted>(s.grid), SurfaceField<Lifted>(s.grid)};
  for (int k = 0; k < n; ++k) {
    const FrameData& fd = s.frames[k];
    const double r = fd.position.r, th = fd.position.angles[0], ph = fd.position.angles[1];
    const double F = s.st.warp_sq(r), Fp = s.st.warp_sq_prime(r);
    const auto p = unit_p(th, ph);
    const std::array<std::array<double, 3>, 2> xa{p_theta(th, ph), p_phi(th, ph)};
    const Lifted& V = v[k];
    for (int a = 0; a < 2; ++a) {
      const double Xt = fd.X[a][0], Xr = fd.X[a][1];
      const auto& x = xa[a];
      Lifted D;
      D.vt = d[a][0][k] + 0.5 * Fp / F * (Xt * V.vr + Xr * V.vt);
      D.vr = d[a][1][k] + 0.5 * F * Fp * Xt * V.vt - 0.5 * Fp / F * Xr * V.vr - r * F * dot3(x, V.w);
      const double wx = dot3(V.w, x);
      for (int q = 0; q < 3; ++q)
        D.w[q] = d[a][2 + q][k] + wx * p[q] + (Xr * V.w[q] + x[q] * V.vr) / r;
      out[a][k] = D;
    }
  }
  return out;
}

CheckResult dlogH_minus_alpha_check(const SurfaceData& s) {
  require_h_frame(s);
  const int n = s.grid->size();
  ScalarField logH(s.grid);
  SurfaceField<Lifted> lbar_p(s.grid), l_p(s.grid);
  for (int k = 0; k < n; ++k) {
    const FrameData& fd = s.frames[k];
    logH[k] = std::log(fd.normH);
    lbar_p[k] = lift(fd, scaled(add(fd.H, fd.J), 1.0 / fd.normH2));
    l_p[k] = lift(fd, sub(fd.J, fd.H));
  }
  const CovectorField dlog = differential(logH);
  const auto dl = lifted_derivative(s, lbar_p);
  CheckResult res{0.0, ScalarField(s.grid)};
  for (int k = 0; k < n; ++k) {
    const FrameData& fd = s.frames[k];
    Covector delta{};
    for (int a = 0; a < 2; ++a)
      delta[a] = dlog[k][a] - s.alphaH[k][a] - 0.5 * lifted_inner(s.st, fd, dl[a][k], l_p[k]);
    double m = 0.0;
    for (const Vec4& e : fd.e_tan) m = std::max(m, std::abs(delta[0] * e[2] + delta[1] * e[3]));
    res.field[k] = m;
    res.max_abs = std::max(res.max_abs, m);
  }
  return res;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat theta_operator(const GridSpec& g) {
  std::vector<Eigen::Triplet<double>> trip;
  const int np = g.n_phi(), half = np / 2;
  for (int i = 0; i < g.n_theta(); ++i) {
    const auto& s = g.theta_stencil(i);
    for (int j = 0; j < np; ++j)
      for (std::size_t q = 0; q < s.weight.size(); ++q) {
        const int col = s.flipped[q] ? g.index(s.row[q], (j + half) % np) : g.index(s.row[q], j);
        trip.emplace_back(g.index(i, j), col, s.weight[q]);
      }
  }
  SpMat m(g.size(), g.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat phi_operator(const GridSpec& g) {
  std::vector<Eigen::Triplet<double>> trip;
  const int np = g.n_phi(), half = g.half_width();
  const auto& w = g.phi_weights();
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < np; ++j)
      for (int q = -half; q <= half; ++q)
        if (q != 0) trip.emplace_back(g.index(i, j), g.index(i, ((j + q) % np + np) % np), w[q + half]);
  SpMat m(g.size(), g.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

GaugeSolution solve_gauge(const CovectorField& zeta, const GeometryField& geometry) {
  require_same_grid(zeta.grid, geometry.grid);
  const GridSpec& g = *zeta.grid;
  const int n = g.size();
  const SpMat Dt = theta_operator(g), Dp = phi_operator(g);
  Eigen::VectorXd w00(n), w01(n), w11(n), wt(n), z0(n), z1(n);
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      const int k = g.index(i, j);
      const double W = g.node_weight(i) * geometry[k].area_density;
      const Sym2& si = geometry[k].sigma_inv;
      wt[k] = W;
      w00[k] = W * si[0];
      w01[k] = W * si[1];
      w11[k] = W * si[2];
      z0[k] = zeta[k][0];
      z1[k] = zeta[k][1];
    }
  const SpMat A = SpMat(Dt.transpose() * w00.asDiagonal() * Dt) +
                  SpMat(Dt.transpose() * w01.asDiagonal() * Dp) +
                  SpMat(Dp.transpose() * w01.asDiagonal() * Dt) +
                  SpMat(Dp.transpose() * w11.asDiagonal() * Dp);
  const Eigen::VectorXd b = Dt.transpose() * (w00.cwiseProduct(z0) + w01.cwiseProduct(z1)) +
                            Dp.transpose() * (w01.cwiseProduct(z0) + w11.cwiseProduct(z1));
  GaugeSolution out;
  out.h = ScalarField(zeta.grid);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  if (b.norm() > 0.0) {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(4 * n);
    cg.compute(A);
    h = cg.solve(b);
    out.iterations = static_cast<int>(cg.iterations());
  }
  std::vector<double> hw(n), ww(n);
  for (int k = 0; k < n; ++k) {
    hw[k] = wt[k] * h[k];
    ww[k] = wt[k];
  }
  const double mean = pairwise_sum(hw) / pairwise_sum(ww);
  for (int k = 0; k < n; ++k) out.h[k] = h[k] - mean;
  const Eigen::VectorXd r0 = Dt * h - z0, r1 = Dp * h - z1;
  std::vector<double> res(n);
  for (int k = 0; k < n; ++k)
    res[k] = w00[k] * r0[k] * r0[k] + 2.0 * w01[k] * r0[k] * r1[k] + w11[k] * r1[k] * r1[k];
  out.residual = std::sqrt(std::max(pairwise_sum(res), 0.0));
  return out;
}

CovectorField torsion_after_rescaling(const SurfaceData& s, const ScalarField& h) {
  require_same_grid(s.grid, h.grid);
  const int n = s.grid->size();
  SurfaceField<Lifted> l(s.grid), lb(s.grid);
  for (int k = 0; k < n; ++k) {
    const FrameData& fd = s.frames[k];
    l[k] = lift(fd, scaled(fd.ell, std::exp(h[k])));
    lb[k] = lift(fd, scaled(fd.ellbar, std::exp(-h[k])));
  }
  const auto dl = lifted_derivative(s, l);
  CovectorField out(s.grid);
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < 2; ++a) out[k][a] = 0.5 * lifted_inner(s.st, s.frames[k], dl[a][k], lb[k]);
  return out;
}

TorsionFreeFrame torsion_free_frame(const SurfaceData& s) {
  TorsionFreeFrame t;
  t.gauge = solve_gauge(s.beta, s.geometry);
  const int n = s.grid->size();
  t.L = SurfaceField<Vec4>(s.grid);
  t.Lbar = SurfaceField<Vec4>(s.grid);
  t.chi = Sym2Field(s.grid);
  t.chibar = Sym2Field(s.grid);
  t.zeta = CovectorField(s.grid);
  const CovectorField dh = differential(t.gauge.h);
  for (int k = 0; k < n; ++k) {
    const FrameData& fd = s.frames[k];
    const double e = std::exp(t.gauge.h[k]);
    t.L[k] = scaled(fd.ell, e);
    t.Lbar[k] = scaled(fd.ellbar, 1.0 / e);
    for (int q = 0; q < 3; ++q) {
      t.chi[k][q] = e * fd.chi_gs[q];
      t.chibar[k][q] = fd.chibar_gs[q] / e;
    }
    t.zeta[k] = {s.beta[k][0] - dh[k][0], s.beta[k][1] - dh[k][1]};
  }
  t.zeta_norm = max_abs(sigma_norm(torsion_after_rescaling(s, t.gauge.h), s.geometry));
  return t;
}

ScalarField dzeta_field(const SurfaceData& s, const ScalarField& u) {
  return exterior_derivative_1form(torsion_after_rescaling(s, u));
}

ScalarField dzeta_ricci(const SurfaceData& s) {
  ScalarField out(s.grid);
  parallel_for(out.size(), [&](int k) {
    const FrameData& fd = s.frames[k];
    const Riemann R = riemann_exact(s.st, fd.position);
    double curv = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d)
            curv += R(a, b, c, d) * fd.ellbar[a] * fd.ell[b] * fd.X[0][c] * fd.X[1][d];
    const auto chi_m = mixed(fd.geom.sigma_inv, fd.chi_gs);  // chi_a^c
    const Sym2& cb = fd.chibar_gs;
    const double cbm[2][2] = {{cb[0], cb[1]}, {cb[1], cb[2]}};
    double comm = 0.0;
    for (int c = 0; c < 2; ++c) comm += chi_m[1][c] * cbm[0][c] - chi_m[0][c] * cbm[1][c];
    out[k] = 0.5 * (curv + comm);
  });
  return out;
}

}  // namespace nullgeo
