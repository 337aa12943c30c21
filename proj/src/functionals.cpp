#include "nullgeo/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <regex>

namespace nullgeo {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::identity_ok:
      return "identity_ok";
    case Verdict::inequality_ok:
      return "inequality_ok";
    case Verdict::strict_positive:
      return "strict_positive";
    case Verdict::violated:
      return "violated";
    case Verdict::hypotheses_failed:
      return "hypotheses_failed";
  }
  return "?";
}

const char* to_string(Branch b) { return b == Branch::incoming ? "incoming" : "outgoing"; }

const char* to_string(Family f) { return f == Family::chi_family ? "chi_family" : "chibar_family"; }

double relative_of(double value, double scale) {
  if (scale == 0.0) return value == 0.0 ? 0.0 : std::copysign(INFINITY, value);
  return value / scale;
}

void attach_refined(IdentityReport& base, const IdentityReport& refined) {
  base.refined_value = refined.value;
  base.refined_relative = refined.relative;
  base.refined_n_theta = refined.n_theta;
  base.refined_n_phi = refined.n_phi;
}

// ---- Evaluation ----------------------------------------------------------

Evaluation::Evaluation(const Spacetime& st, const SurfaceSpec& spec, const GridPtr& grid,
                       const Tolerances& tol, const FrameOptions& opts)
    : surface_(std::make_shared<SurfaceData>(build_surface(st, spec, grid, opts))), tol_(tol) {}

const TorsionFreeFrame& Evaluation::torsion_free() const {
  std::call_once(tf_once_, [&] { tf_ = std::make_shared<TorsionFreeFrame>(torsion_free_frame(*surface_)); });
  return *tf_;
}

const ScalarField& Evaluation::dzeta() const {
  std::call_once(dz_once_, [&] {
    ScalarField d = dzeta_field(*surface_, ScalarField(surface_->grid, 0.0));
    for (int k = 0; k < d.size(); ++k) d[k] /= surface_->geometry[k].area_density;
    dz_ = std::make_shared<ScalarField>(std::move(d));
  });
  return *dz_;
}

namespace {

Vec4 tangent(const FrameData& fd, double u0, double u1) {
  Vec4 v{};
  for (int c = 0; c < 4; ++c) v[c] = u0 * fd.X[0][c] + u1 * fd.X[1][c];
  return v;
}

/// sigma^{ab} c_b X_a
Vec4 raise(const FrameData& fd, const Covector& c) {
  const Sym2& si = fd.geom.sigma_inv;
  return tangent(fd, si[0] * c[0] + si[1] * c[1], si[1] * c[0] + si[2] * c[1]);
}

/// T^{ab} c_b X_a for a packed symmetric upper tensor.
Vec4 apply_upper(const FrameData& fd, const Sym2& t, const Covector& c) {
  return tangent(fd, t[0] * c[0] + t[1] * c[1], t[1] * c[0] + t[2] * c[1]);
}

Vec4 scale_vec(const Vec4& v, double c) { return {c * v[0], c * v[1], c * v[2], c * v[3]}; }
Vec4 combine(const Vec4& a, double ca, const Vec4& b, double cb) {
  return {ca * a[0] + cb * b[0], ca * a[1] + cb * b[1], ca * a[2] + cb * b[2], ca * a[3] + cb * b[3]};
}

/// <d/dt, v>
double dt_inner(const FrameData& fd, const Vec4& v) { return fd.g[0] * v[0]; }

double Qr(const FrameData& fd, const Vec4& x, const Vec4& y) { return Q(fd.position.r, x, y); }

double integral(const ScalarField& f, const SurfaceData& s) { return integrate(f, s.geometry); }

double abs_integral(const ScalarField& f, const SurfaceData& s) {
  ScalarField a(f.grid);
  for (int k = 0; k < a.size(); ++k) a[k] = std::abs(f[k]);
  return integrate(a, s.geometry);
}

double trace(const Sym2& si, const Sym2& m) { return si[0] * m[0] + 2.0 * si[1] * m[1] + si[2] * m[2]; }

/// sigma-norm of the trace-free part.
double trace_free_norm(const Sym2& sigma, const Sym2& si, const Sym2& m) {
  const double tr = trace(si, m);
  const Sym2 d{m[0] - 0.5 * tr * sigma[0], m[1] - 0.5 * tr * sigma[1], m[2] - 0.5 * tr * sigma[2]};
  const auto a = mixed(si, d);
  return std::sqrt(std::max(a[0][0] * a[0][0] + 2.0 * a[0][1] * a[1][0] + a[1][1] * a[1][1], 0.0));
}

IdentityReport start(const std::string& name, const SurfaceData& s) {
  IdentityReport rep;
  rep.check = name;
  rep.n_theta = s.grid->n_theta();
  rep.n_phi = s.grid->n_phi();
  return rep;
}

/// Fills value, scale and relative from named term fields.
void sum_terms(IdentityReport& rep, const SurfaceData& s,
               const std::vector<std::pair<std::string, ScalarField>>& parts) {
  rep.value = 0.0;
  rep.scale = 0.0;
  std::vector<double> vals;
  for (const auto& [name, field] : parts) {
    const double v = integral(field, s);
    rep.terms.emplace_back(name, v);
    vals.push_back(v);
    rep.scale += std::abs(v);
  }
  rep.value = pairwise_sum(vals);
  rep.relative = relative_of(rep.value, rep.scale);
  ScalarField total(s.grid, 0.0);
  for (const auto& part : parts)
    for (int k = 0; k < total.size(); ++k) total[k] += part.second[k];
  rep.fields.emplace_back("integrand", std::move(total));
}

double band(const Tolerances& tol, double rel_tol, double scale) { return rel_tol * scale + tol.abs_floor; }

void identity_verdict(IdentityReport& rep, const Tolerances& tol) {
  rep.verdict = std::abs(rep.value) <= band(tol, tol.identity, rep.scale) ? Verdict::identity_ok
                                                                           : Verdict::violated;
}

void inequality_verdict(IdentityReport& rep, const Tolerances& tol) {
  if (rep.value >= 10.0 * tol.inequality * rep.scale + tol.abs_floor)
    rep.verdict = Verdict::strict_positive;
  else if (rep.value >= -band(tol, tol.inequality, rep.scale))
    rep.verdict = Verdict::inequality_ok;
  else
    rep.verdict = Verdict::violated;
}

/// Two-outcome form for inequalities without a strict tier.
void one_sided_verdict(IdentityReport& rep, const Tolerances& tol) {
  rep.verdict = rep.value >= -band(tol, tol.inequality, rep.scale) ? Verdict::inequality_ok : Verdict::violated;
}

/// Criteria hold when value <= tol * scale; a violation means strict inequality downstream.
bool criterion_holds(const IdentityReport& rep, const Tolerances& tol) {
  return rep.value <= band(tol, tol.inequality, rep.scale);
}

std::string node_list(const std::vector<int>& nodes) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(nodes[i]);
  }
  return out;
}

constexpr std::size_t kMaxListedNodes = 8;

void note_node(std::vector<int>& list, int k) {
  if (list.size() < kMaxListedNodes) list.push_back(k);
}

bool h_frame_or_note(IdentityReport& rep, const SurfaceData& s) {
  if (s.h_ok) return true;
  rep.verdict = Verdict::hypotheses_failed;
  rep.notes.push_back("mean curvature vector not spacelike/future-frame: " + s.h_diagnostic);
  return false;
}

/// Torsion-free hypothesis, recorded in the report; false when it fails.
bool torsion_hypothesis(IdentityReport& rep, const Evaluation& ev) {
  const TorsionFreeFrame& tf = ev.torsion_free();
  const double dz = max_abs(ev.dzeta());
  rep.diagnostics["gauge_residual"] = tf.gauge.residual;
  rep.diagnostics["zeta_norm"] = tf.zeta_norm;
  rep.diagnostics["dzeta_max"] = dz;
  bool ok = true;
  if (!(dz <= ev.tolerances().dzeta)) {
    rep.notes.push_back("d zeta does not vanish (max " + std::to_string(dz) + ")");
    ok = false;
  }
  if (!(tf.gauge.residual <= ev.tolerances().gauge)) {
    rep.notes.push_back("gauge residual above threshold (" + std::to_string(tf.gauge.residual) + ")");
    ok = false;
  }
  return ok;
}

struct NodeAlgebra {
  MixedCurvatures<double> m;
  NewtonPair<double> t;
};

NodeAlgebra node_algebra(const FrameData& fd, const Sym2& chi, const Sym2& chibar, int r, int s) {
  const CurvTuple<double> ct = node_tuple(fd.geom.sigma, chi, chibar);
  return {mixed_curvatures(ct), newton_tensors(ct, r, s)};
}

void check_rs(int r, int s, int n) {
  if (r < 0 || s < 0 || r + s > n - 1) throw PreconditionError("(r, s) must satisfy 0 <= r + s <= n - 1");
}

double binom(int n, int k) { return algebra_detail::binomial<double>(n, k); }

bool schwarzschild_family(const Spacetime& st) {
  return st.kind() == SpacetimeKind::schwarzschild || st.kind() == SpacetimeKind::minkowski;
}

}  // namespace

CurvTuple<double> node_tuple(const Sym2& sigma, const Sym2& chi, const Sym2& chibar) {
  CurvTuple<double> ct;
  ct.dim = 2;
  ct.sigma = {sigma[0], sigma[1], sigma[1], sigma[2]};
  ct.chi = {chi[0], chi[1], chi[1], chi[2]};
  ct.chibar = {chibar[0], chibar[1], chibar[1], chibar[2]};
  return ct;
}

Sym2 pack_upper(const std::vector<double>& t) { return {t[0], 0.5 * (t[1] + t[2]), t[3]}; }

// ---- weights -------------------------------------------------------------

Weight parse_weight(const std::string& text) {
  Weight w;
  w.text = text;
  static const std::regex inv_h(R"(^\s*1\s*/\s*\|\s*H\s*\|\s*$)");
  static const std::regex inv_hrs(R"(^\s*1\s*/\s*H_\{\s*(\d+)\s*,\s*(\d+)\s*\}\s*$)");
  std::smatch m;
  if (std::regex_match(text, inv_h)) {
    w.kind = Weight::Kind::inverse_norm_H;
  } else if (std::regex_match(text, m, inv_hrs)) {
    w.kind = Weight::Kind::inverse_H_rs;
    w.r = std::stoi(m[1]);
    w.s = std::stoi(m[2]);
  } else {
    w.kind = Weight::Kind::expression;
    w.expr = parse_expression(text, ParseOptions{true});
  }
  return w;
}

WeightField expression_field(const SurfaceData& s, const Expr& e) {
  WeightField out{ScalarField(s.grid), CovectorField(s.grid)};
  parallel_for(s.grid->size(), [&](int k) {
    const FrameData& fd = s.frames[k];
    using ad::Dual2;
    Bindings<Dual2> b;
    b.theta = Dual2(fd.position.angles[0], 1.0, 0.0);
    b.phi = Dual2(fd.position.angles[1], 0.0, 1.0);
    b.t = Dual2(fd.position.t, fd.X[0][0], fd.X[1][0]);
    b.r = Dual2(fd.position.r, fd.X[0][1], fd.X[1][1]);
    const Dual2 v = evaluate(e, b);
    out.value[k] = v.v;
    out.grad[k] = {v.g[0], v.g[1]};
  });
  return out;
}

WeightField resolve_weight(const Evaluation& ev, const Weight& w) {
  const SurfaceData& s = ev.surface();
  switch (w.kind) {
    case Weight::Kind::expression:
      return expression_field(s, *w.expr);
    case Weight::Kind::inverse_norm_H: {
      require_h_frame(s);
      WeightField out{ScalarField(s.grid), CovectorField()};
      for (int k = 0; k < out.value.size(); ++k) out.value[k] = 1.0 / s.frames[k].normH;
      out.grad = differential(out.value);
      return out;
    }
    case Weight::Kind::inverse_H_rs: {
      check_rs(w.r, w.s, s.st.n());
      const TorsionFreeFrame& tf = ev.torsion_free();
      WeightField out{ScalarField(s.grid), CovectorField()};
      for (int k = 0; k < out.value.size(); ++k) {
        const auto m = mixed_curvatures(node_tuple(s.frames[k].geom.sigma, tf.chi[k], tf.chibar[k]));
        const double h = m.h(w.r, w.s);
        if (h == 0.0) throw DomainError("weight 1/H_{r,s}: H_{r,s} vanishes on the grid");
        out.value[k] = 1.0 / h;
      }
      out.grad = differential(out.value);
      return out;
    }
  }
  throw PreconditionError("unknown weight kind");
}

// ---- weighted Minkowski formulas -----------------------------------------

IdentityReport minkowski_residual_basic(const Evaluation& ev, const Weight& w, const Expr& u_expr) {
  const SurfaceData& s = ev.surface();
  IdentityReport rep = start("minkowski_basic", s);
  const WeightField f = resolve_weight(ev, w);
  const WeightField u = expression_field(s, u_expr);
  const double n = s.st.n();
  ScalarField t1(s.grid), t2(s.grid), t3(s.grid), t4(s.grid);
  parallel_for(s.grid->size(), [&](int k) {
    const FrameData& fd = s.frames[k];
    const Vec4 Lb = scale_vec(fd.ellbar, std::exp(u.value[k]));
    // (D^a Lbar)^perp = -1/2 <D^a Lbar, L> Lbar = sigma^{ab} (beta_b + u_b) Lbar
    const Vec4 conn = raise(fd, {fd.beta[0] + u.grad[k][0], fd.beta[1] + u.grad[k][1]});
    t1[k] = f.value[k] * (n - 1.0) / n * (-n * dt_inner(fd, Lb));
    t2[k] = f.value[k] * Qr(fd, fd.H, Lb);
    t3[k] = f.value[k] * Qr(fd, conn, Lb);
    t4[k] = Qr(fd, raise(fd, f.grad[k]), Lb);
  });
  sum_terms(rep, s, {{"xi", t1}, {"Q(H,Lbar)", t2}, {"Q(e_a,(D^a Lbar)^perp)", t3}, {"Q(grad f,Lbar)", t4}});
  identity_verdict(rep, ev.tolerances());
  return rep;
}

IdentityReport minkowski_residual_pm(const Evaluation& ev, const Weight& w, Branch branch) {
  const SurfaceData& s = ev.surface();
  IdentityReport rep = start(std::string("minkowski_pm_") + to_string(branch), s);
  if (!h_frame_or_note(rep, s)) return rep;
  const WeightField f = resolve_weight(ev, w);
  const double n = s.st.n();
  const double sgn = branch == Branch::incoming ? 1.0 : -1.0;
  ScalarField t1(s.grid), t2(s.grid), t3(s.grid);
  parallel_for(s.grid->size(), [&](int k) {
    const FrameData& fd = s.frames[k];
    const Vec4 N = combine(fd.H, sgn, fd.J, 1.0);
    const double fh = f.value[k] / fd.normH;
    const Covector a = s.alphaH[k];
    const Vec4 V = raise(fd, {f.grad[k][0] + sgn * f.value[k] * a[0], f.grad[k][1] + sgn * f.value[k] * a[1]});
    t1[k] = fh * (n - 1.0) / n * (-n * dt_inner(fd, N));
    t2[k] = fh * Qr(fd, fd.H, fd.J);
    t3[k] = Qr(fd, V, N) / fd.normH;
  });
  sum_terms(rep, s, {{"xi", t1}, {"Q(H,J)", t2}, {"Q(grad f +- f alpha, +-H+J)", t3}});
  identity_verdict(rep, ev.tolerances());
  return rep;
}

IdentityReport euclidean_reduction_check(const Evaluation& ev, const Weight& w) {
  const SurfaceData& s = ev.surface();
  if (!(s.st.kind() == SpacetimeKind::minkowski ||
        (s.st.kind() == SpacetimeKind::schwarzschild && s.st.mass() == 0.0)))
    throw PreconditionError("Euclidean reduction needs the Minkowski spacetime");
  for (int k = 0; k < s.grid->size(); ++k)
    if (s.frames[k].X[0][0] != 0.0 || s.frames[k].X[1][0] != 0.0)
      throw PreconditionError("Euclidean reduction needs a surface in a t = const slice");
  IdentityReport rep = start("euclidean_reduction", s);
  const WeightField f = resolve_weight(ev, w);
  const double nm1 = s.st.n() - 1.0;
  ScalarField a(s.grid), b(s.grid), c(s.grid), area(s.grid);
  parallel_for(s.grid->size(), [&](int k) {
    const FrameData& fd = s.frames[k];
    using ad::HyperDual;
    const HyperDual th = HyperDual::variable(fd.position.angles[0], 0);
    const HyperDual ph = HyperDual::variable(fd.position.angles[1], 1);
    const Jet2 jet = eval_jet2(s.spec, fd.position.angles[0], fd.position.angles[1]);
    const HyperDual rho = jet.rho;
    const std::array<HyperDual, 3> x{rho * ad::sin(th) * ad::cos(ph), rho * ad::sin(th) * ad::sin(ph),
                                     rho * ad::cos(th)};
    std::array<std::array<double, 3>, 2> xa{};
    std::array<std::array<std::array<double, 3>, 2>, 2> xab{};
    std::array<double, 3> pos{};
    for (int q = 0; q < 3; ++q) {
      pos[q] = x[q].v;
      for (int i = 0; i < 2; ++i) {
        xa[i][q] = x[q].g[i];
        for (int j = 0; j < 2; ++j) xab[i][j][q] = x[q].hess(i, j);
      }
    }
    auto dot = [](const std::array<double, 3>& p, const std::array<double, 3>& q) {
      return p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    };
    const std::array<double, 3> cr{xa[0][1] * xa[1][2] - xa[0][2] * xa[1][1],
                                   xa[0][2] * xa[1][0] - xa[0][0] * xa[1][2],
                                   xa[0][0] * xa[1][1] - xa[0][1] * xa[1][0]};
    const double cn = std::sqrt(dot(cr, cr));
    const std::array<double, 3> nu{cr[0] / cn, cr[1] / cn, cr[2] / cn};
    const double s00 = dot(xa[0], xa[0]), s01 = dot(xa[0], xa[1]), s11 = dot(xa[1], xa[1]);
    const double det = s00 * s11 - s01 * s01;
    const double i00 = s11 / det, i01 = -s01 / det, i11 = s00 / det;
    const double trII = i00 * dot(xab[0][0], nu) + 2.0 * i01 * dot(xab[0][1], nu) + i11 * dot(xab[1][1], nu);
    const double H1 = -trII / nm1;
    const double support = dot(pos, nu);
    const double g0 = f.grad[k][0], g1 = f.grad[k][1];
    const double gradf_dot_x = (i00 * g0 + i01 * g1) * dot(xa[0], pos) + (i01 * g0 + i11 * g1) * dot(xa[1], pos);
    a[k] = f.value[k];
    b[k] = -f.value[k] * H1 * support;
    c[k] = gradf_dot_x / nm1;
    area[k] = std::sqrt(det);
  });
  // Purely Euclidean measure.
  auto eint = [&](const ScalarField& x) { return integrate(x, area); };
  const double A = eint(a), B = eint(b), C = eint(c);
  rep.terms = {{"int f", A}, {"-int f H1 <X,nu>", B}, {"1/(n-1) int <grad f,X>", C}};
  rep.value = pairwise_sum(std::vector<double>{A, B, C});
  rep.scale = std::abs(A) + std::abs(B) + std::abs(C);
  rep.relative = relative_of(rep.value, rep.scale);
  ScalarField total(s.grid);
  for (int k = 0; k < total.size(); ++k) total[k] = a[k] + b[k] + c[k];
  rep.fields.emplace_back("integrand", std::move(total));
  identity_verdict(rep, ev.tolerances());

  const IdentityReport st = minkowski_residual_pm(ev, w, Branch::incoming);
  rep.diagnostics["spacetime_value"] = st.value;
  rep.diagnostics["spacetime_relative"] = st.relative;
  rep.diagnostics["spacetime_value_over_n_minus_1"] = st.value / nm1;
  rep.diagnostics["agreement"] = std::abs(st.relative - rep.relative);
  if (st.verdict != Verdict::identity_ok) {
    rep.verdict = st.verdict == Verdict::hypotheses_failed ? Verdict::hypotheses_failed : Verdict::violated;
    rep.notes.push_back("spacetime incoming-branch residual did not pass");
  }
  return rep;
}

// ---- Heintze-Karcher and Alexandrov --------------------------------------

IdentityReport hk_functional(const Evaluation& ev, Branch branch) {
  const SurfaceData& s = ev.surface();
  IdentityReport rep = start(std::string("hk_") + to_string(branch), s);
  if (!h_frame_or_note(rep, s)) return rep;
  const double n = s.st.n();
  const double sgn = branch == Branch::incoming ? 1.0 : -1.0;
  ScalarField a(s.grid), b(s.grid);
  std::vector<int> bad;
  double shear = 0.0;
  const NullDirection dir = branch == Branch::incoming ? NullDirection::incoming : NullDirection::outgoing;
  for (int k = 0; k < s.grid->size(); ++k) {
    const FrameData& fd = s.frames[k];
    const Vec4 N = combine(fd.H, sgn, fd.J, 1.0);
    const double inv2 = 1.0 / fd.normH2;
    a[k] = -(n - 1.0) * inv2 * dt_inner(fd, N);
    b[k] = inv2 * Qr(fd, fd.H, fd.J);
    // incoming: <H, Lbar> > 0; outgoing: <H, L> < 0
    const double hn = branch == Branch::incoming ? inner(fd.g, fd.H, fd.ellbar) : -inner(fd.g, fd.H, fd.ell);
    if (!(hn > 0.0)) note_node(bad, k);
    shear = std::max(shear, shear_deficit(fd, dir));
  }
  sum_terms(rep, s, {{"-(n-1) |H|^-2 <dt,+-H+J>", a}, {"|H|^-2 Q(H,J)", b}});
  const Tolerances& tol = ev.tolerances();
  inequality_verdict(rep, tol);
  rep.diagnostics["shear_deficit_max"] = shear;
  rep.classification = std::abs(rep.value) <= band(tol, tol.equality, rep.scale) ? "equality"
                       : rep.verdict == Verdict::strict_positive                ? "strict"
                                                                                : "inequality";
  rep.notes.push_back(std::string(branch == Branch::incoming ? "future" : "past") +
                      " incoming null embeddedness assumed, not checked");
  if (!bad.empty()) {
    rep.verdict = Verdict::hypotheses_failed;
    rep.notes.push_back(std::string(branch == Branch::incoming ? "<H,Lbar> > 0" : "<H,L> < 0") +
                        " fails at nodes " + node_list(bad));
  }
  return rep;
}

IdentityReport alexandrov_criterion(const Evaluation& ev, Branch branch) {
  const SurfaceData& s = ev.surface();
  IdentityReport rep = start(std::string("alexandrov_") + to_string(branch), s);
  if (!h_frame_or_note(rep, s)) return rep;
  const double sgn = branch == Branch::incoming ? 1.0 : -1.0;
  ScalarField logH(s.grid);
  for (int k = 0; k < logH.size(); ++k) logH[k] = std::log(s.frames[k].normH);
  const CovectorField dlog = differential(logH);
  ScalarField g(s.grid), ga(s.grid);
  double shear = 0.0;
  const NullDirection dir = branch == Branch::incoming ? NullDirection::incoming : NullDirection::outgoing;
  for (int k = 0; k < s.grid->size(); ++k) {
    const FrameData& fd = s.frames[k];
    const Vec4 N = combine(fd.H, sgn, fd.J, 1.0);
    const double inv2 = 1.0 / fd.normH2;
    g[k] = inv2 * Qr(fd, raise(fd, dlog[k]), N);
    ga[k] = -sgn * inv2 * Qr(fd, raise(fd, s.alphaH[k]), N);
    shear = std::max(shear, shear_deficit(fd, dir));
  }
  sum_terms(rep, s, {{"grad log|H|", g}, {"alpha_H", ga}});
  const Tolerances& tol = ev.tolerances();
  const bool holds = criterion_holds(rep, tol);
  rep.verdict = holds ? Verdict::inequality_ok : Verdict::strict_positive;

  const IdentityReport hk = hk_functional(ev, branch);
  rep.diagnostics["hk_value"] = hk.value;
  rep.diagnostics["hk_scale"] = hk.scale;
  rep.diagnostics["shear_deficit_max"] = shear;
  const bool hk_strict = hk.value > band(tol, tol.inequality, hk.scale);
  rep.diagnostics["implication_ok"] = (holds || hk_strict) ? 1.0 : 0.0;
  const bool symmetric_family = s.st.kind() == SpacetimeKind::schwarzschild && s.st.mass() > 0.0;
  if (holds && shear <= tol.shear)
    rep.classification = symmetric_family ? "null_hypersurface_of_symmetry" : "shear_free";
  else if (!holds)
    rep.classification = "not_shear_free";
  else
    rep.classification = "inconclusive";
  rep.notes.push_back(std::string("future ") + (branch == Branch::incoming ? "incoming" : "outgoing") +
                      " null embeddedness assumed, not checked");
  if (hk.verdict == Verdict::hypotheses_failed) {
    rep.verdict = Verdict::hypotheses_failed;
    rep.notes.insert(rep.notes.end(), hk.notes.begin(), hk.notes.end());
  }
  return rep;
}

// ---- higher order ----------------------------------------------------------

IdentityReport higher_minkowski_residual(const Evaluation& ev, const Weight& w, int r, int s_,
                                         Family family) {
  const SurfaceData& s = ev.surface();
  if (!s.st.constant_curvature())
    throw PreconditionError("higher-order Minkowski identities need a constant-curvature spacetime");
  const int n = s.st.n();
  check_rs(r, s_, n);
  if (family == Family::chi_family && r < 1) throw PreconditionError("the L equation needs r >= 1");
  if (family == Family::chibar_family && s_ < 1) throw PreconditionError("the Lbar equation needs s >= 1");
  char name[64];
  std::snprintf(name, sizeof name, "higher_minkowski_%d_%d_%s", r, s_, to_string(family));
  IdentityReport rep = start(name, s);
  const bool torsion_ok = torsion_hypothesis(rep, ev);
  const TorsionFreeFrame& tf = ev.torsion_free();
  const WeightField f = resolve_weight(ev, w);
  ScalarField a(s.grid), b(s.grid), c(s.grid);
  Sym2Field T(s.grid);
  const double rs = r + s_;
  parallel_for(s.grid->size(), [&](int k) {
    const FrameData& fd = s.frames[k];
    const NodeAlgebra na = node_algebra(fd, tf.chi[k], tf.chibar[k], r, s_);
    const Vec4& L = tf.L[k];
    const Vec4& Lb = tf.Lbar[k];
    const double qll = Qr(fd, L, Lb);
    if (family == Family::chi_family) {
      T[k] = pack_upper(na.t.T_up);
      a[k] = r * (n - rs) / rs * f.value[k] * na.m.p(r - 1, s_) * dt_inner(fd, L);
      b[k] = 0.5 * r * f.value[k] * na.m.p(r, s_) * qll;
      c[k] = Qr(fd, L, apply_upper(fd, T[k], f.grad[k]));
    } else {
      T[k] = pack_upper(na.t.Tbar_up);
      a[k] = s_ * (n - rs) / rs * f.value[k] * na.m.p(r, s_ - 1) * dt_inner(fd, Lb);
      b[k] = -0.5 * s_ * f.value[k] * na.m.p(r, s_) * qll;
      c[k] = Qr(fd, Lb, apply_upper(fd, T[k], f.grad[k]));
    }
  });
  sum_terms(rep, s, {{"<N,dt> term", a}, {"Q(L,Lbar) term", b}, {"Q(N,T(grad f))", c}});
  identity_verdict(rep, ev.tolerances());
  const CovectorField div = covariant_divergence(T, s.geometry);
  const ScalarField dn = sigma_norm(div, s.geometry);
  rep.diagnostics["div_T_max"] = max_abs(dn);
  rep.fields.emplace_back("div_T", dn);
  if (!torsion_ok) rep.verdict = Verdict::hypotheses_failed;
  return rep;
}

DzetaInvariance dzeta_invariance(const Evaluation& ev, const Expr& u_expr) {
  const SurfaceData& s = ev.surface();
  const WeightField u = expression_field(s, u_expr);
  ScalarField du = dzeta_field(s, u.value);
  const ScalarField ricci = dzeta_ricci(s);
  const ScalarField& d0 = ev.dzeta();
  DzetaInvariance out;
  for (int k = 0; k < du.size(); ++k) {
    const double area = s.geometry[k].area_density;
    out.invariance = std::max(out.invariance, std::abs(du[k] / area - d0[k]));
    out.ricci_diff = std::max(out.ricci_diff, std::abs(ricci[k] / area - d0[k]));
    out.dzeta_max = std::max(out.dzeta_max, std::abs(d0[k]));
  }
  return out;
}

// ---- Schwarzschild ---------------------------------------------------------

HypothesisFlags schwarzschild_hypotheses(const Evaluation& ev) {
  const SurfaceData& s = ev.surface();
  if (!schwarzschild_family(s.st)) throw PreconditionError("Schwarzschild hypotheses need the Schwarzschild family");
  const Tolerances& tol = ev.tolerances();
  HypothesisFlags h;
  h.H_spacelike = s.h_ok;
  const TorsionFreeFrame& tf = ev.torsion_free();
  h.gauge_residual = tf.gauge.residual;
  h.dzeta_max = max_abs(ev.dzeta());
  h.dzeta_zero = h.dzeta_max <= tol.dzeta;
  const int d = s.st.n() - 1;
  std::vector<bool> cone_chi(d + 1, true), cone_chib(d + 1, true);
  h.Q_LLbar_nonneg = h.chi_positive = h.chibar_neg_positive = h.QsqL_cond = h.QsqLbar_cond = true;
  auto fail = [&](bool& flag, const char* name, int k) {
    flag = false;
    note_node(h.failing_nodes[name], k);
  };
  for (int k = 0; k < s.grid->size(); ++k) {
    const FrameData& fd = s.frames[k];
    const double r = fd.position.r;
    // every flag is invariant under L -> fL, Lbar -> Lbar / f with f > 0
    const Vec4& L = fd.ell;
    const Vec4& Lb = fd.ellbar;
    if (!(Qr(fd, L, Lb) >= -tol.pointwise)) fail(h.Q_LLbar_nonneg, "Q_LLbar_nonneg", k);
    const auto ev_chi = relative_eigenvalues(node_tuple(fd.geom.sigma, fd.chi_gs, fd.chibar_gs).sigma,
                                             {fd.chi_gs[0], fd.chi_gs[1], fd.chi_gs[1], fd.chi_gs[2]}, d);
    const auto ev_chib = relative_eigenvalues(
        node_tuple(fd.geom.sigma, fd.chi_gs, fd.chibar_gs).sigma,
        {-fd.chibar_gs[0], -fd.chibar_gs[1], -fd.chibar_gs[1], -fd.chibar_gs[2]}, d);
    if (!(*std::min_element(ev_chi.begin(), ev_chi.end()) > tol.pointwise)) fail(h.chi_positive, "chi_positive", k);
    if (!(*std::min_element(ev_chib.begin(), ev_chib.end()) > tol.pointwise))
      fail(h.chibar_neg_positive, "chibar_neg_positive", k);
    for (int kk = 1; kk <= d; ++kk) {
      if (!gamma_cone_member(ev_chi, kk)) cone_chi[kk] = false;
      if (!gamma_cone_member(ev_chib, kk)) cone_chib[kk] = false;
    }
    // Q^2 = r^2 g on the (t, r) block
    auto q2 = [&](const Vec4& x, const Vec4& v) { return r * r * (fd.g[0] * x[0] * v[0] + fd.g[1] * x[1] * v[1]); };
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::vector<Vec4> dirs{fd.X[0], fd.X[1]};
    for (int q = 0; q < 16; ++q) {
      const double a = angle(rng);
      dirs.push_back(combine(fd.e_tan[0], std::cos(a), fd.e_tan[1], std::sin(a)));
    }
    bool okL = true, okLb = true;
    for (const Vec4& v : dirs) {
      if (!(q2(L, v) * Qr(fd, L, v) <= tol.pointwise)) okL = false;
      if (!(q2(Lb, v) * Qr(fd, Lb, v) >= -tol.pointwise)) okLb = false;
    }
    if (!okL) fail(h.QsqL_cond, "QsqL_cond", k);
    if (!okLb) fail(h.QsqLbar_cond, "QsqLbar_cond", k);
  }
  for (int kk = 1; kk <= d; ++kk) h.cone_membership.push_back({kk, {cone_chi[kk], cone_chib[kk]}});
  return h;
}

namespace {

/// Which hypotheses give a sign for the divergence for T_{k,0} (chi) or Tbar_{0,k} (chibar).
bool divergence_sign_applies(const HypothesisFlags& h, int k, Family family) {
  if (k == 1) return true;
  if (k == 2) return h.case1();
  return family == Family::chi_family ? h.case2() : h.case3();
}

}  // namespace

IdentityReport schwarzschild_mink_inequality(const Evaluation& ev, const Weight& w, int k, Family family) {
  const SurfaceData& s = ev.surface();
  if (!schwarzschild_family(s.st)) throw PreconditionError("Schwarzschild inequalities need the Schwarzschild family");
  const int n = s.st.n();
  if (k < 1 || k > n - 1) throw PreconditionError("order must satisfy 1 <= r <= n - 1");
  char name[64];
  std::snprintf(name, sizeof name, "schwarzschild_mink_%d_%s", k, to_string(family));
  IdentityReport rep = start(name, s);
  const Tolerances& tol = ev.tolerances();
  const HypothesisFlags h = schwarzschild_hypotheses(ev);
  bool hyp_ok = h.dzeta_zero && h.gauge_residual <= tol.gauge;
  if (!hyp_ok) rep.notes.push_back("torsion-free frame unavailable (d zeta or gauge residual above threshold)");
  if (!divergence_sign_applies(h, k, family)) {
    hyp_ok = false;
    rep.notes.push_back("no divergence-sign case applies");
  }
  rep.diagnostics["case1"] = h.case1();
  rep.diagnostics["case2"] = h.case2();
  rep.diagnostics["case3"] = h.case3();
  rep.diagnostics["gauge_residual"] = h.gauge_residual;
  rep.diagnostics["dzeta_max"] = h.dzeta_max;

  const TorsionFreeFrame& tf = ev.torsion_free();
  const WeightField f = resolve_weight(ev, w);
  for (int q = 0; q < f.value.size(); ++q)
    if (!(f.value[q] > 0.0)) {
      hyp_ok = false;
      rep.notes.push_back("weight is not positive on the grid");
      break;
    }
  const int r = family == Family::chi_family ? k : 0;
  const int s_ = family == Family::chi_family ? 0 : k;
  const double norm = 1.0 / (binom(n - 1, k - 1) * (n - k));
  ScalarField a(s.grid), b(s.grid), c(s.grid);
  Sym2Field T(s.grid);
  parallel_for(s.grid->size(), [&](int q) {
    const FrameData& fd = s.frames[q];
    const NodeAlgebra na = node_algebra(fd, tf.chi[q], tf.chibar[q], r, s_);
    const double qll = Qr(fd, tf.L[q], tf.Lbar[q]);
    if (family == Family::chi_family) {
      T[q] = pack_upper(na.t.T_up);
      a[q] = f.value[q] * na.m.h(k - 1, 0) * dt_inner(fd, tf.L[q]);
      b[q] = 0.5 * f.value[q] * na.m.h(k, 0) * qll;
      c[q] = -norm * Qr(fd, apply_upper(fd, T[q], f.grad[q]), tf.L[q]);
    } else {
      T[q] = pack_upper(na.t.Tbar_up);
      a[q] = f.value[q] * na.m.h(0, k - 1) * dt_inner(fd, tf.Lbar[q]);
      b[q] = -0.5 * f.value[q] * na.m.h(0, k) * qll;
      c[q] = -norm * Qr(fd, apply_upper(fd, T[q], f.grad[q]), tf.Lbar[q]);
    }
  });
  // The Lbar inequality is stated for the Newton tensor of -chibar, which flips
  // the sign of the whole left-hand side relative to the Tbar form used here.
  if (family == Family::chibar_family)
    for (int q = 0; q < a.size(); ++q) {
      a[q] = -a[q];
      b[q] = -b[q];
      c[q] = -c[q];
    }
  sum_terms(rep, s, {{"f H_{k-1} <N,dt>", a}, {"+-1/2 f H_k Q(L,Lbar)", b}, {"-c Q(T(grad f),N)", c}});
  one_sided_verdict(rep, tol);
  // (div T)^b Q(N, X_b), T the Newton tensor of chi or of -chibar
  const CovectorField div = covariant_divergence(T, s.geometry);
  const double tsign = family == Family::chi_family ? 1.0 : -1.0;
  ScalarField dsign(s.grid), fd_sign(s.grid);
  for (int q = 0; q < dsign.size(); ++q) {
    const FrameData& fd = s.frames[q];
    const Vec4& N = family == Family::chi_family ? tf.L[q] : tf.Lbar[q];
    dsign[q] = tsign * (div[q][0] * Qr(fd, N, fd.X[0]) + div[q][1] * Qr(fd, N, fd.X[1]));
    fd_sign[q] = f.value[q] * dsign[q];
  }
  double dmax = -INFINITY;
  for (int q = 0; q < dsign.size(); ++q) dmax = std::max(dmax, dsign[q]);
  rep.diagnostics["divergence_sign_max"] = dmax;
  // Integrating the divergence identity: value = -norm * int f (div T) Q(N, e)
  rep.diagnostics["divergence_prediction"] = -norm * integral(fd_sign, s);
  rep.diagnostics["balance"] = rep.value + norm * integral(fd_sign, s);
  rep.fields.emplace_back("divergence_sign", dsign);
  if (!hyp_ok) rep.verdict = Verdict::hypotheses_failed;
  return rep;
}

IdentityReport higher_alexandrov_criterion(const Evaluation& ev, int k, Family family) {
  const SurfaceData& s = ev.surface();
  const bool cc = s.st.constant_curvature();
  if (!cc && !schwarzschild_family(s.st))
    throw PreconditionError("higher-order Alexandrov criteria need constant curvature or Schwarzschild");
  const int n = s.st.n();
  if (k < 1 || k > n - 1) throw PreconditionError("order must satisfy 1 <= k <= n - 1");
  char name[64];
  std::snprintf(name, sizeof name, "higher_alexandrov_%d_%s", k, to_string(family));
  IdentityReport rep = start(name, s);
  const Tolerances& tol = ev.tolerances();
  bool hyp_ok = torsion_hypothesis(rep, ev);
  const TorsionFreeFrame& tf = ev.torsion_free();
  const bool chi = family == Family::chi_family;
  const int r = chi ? k : 0, s_ = chi ? 0 : k;
  ScalarField P(s.grid);
  Sym2Field T(s.grid);
  std::vector<int> cone_bad, sign_bad;
  for (int q = 0; q < s.grid->size(); ++q) {
    const FrameData& fd = s.frames[q];
    const NodeAlgebra na = node_algebra(fd, tf.chi[q], tf.chibar[q], r, s_);
    P[q] = na.m.p(r, s_);
    T[q] = pack_upper(chi ? na.t.T_up : na.t.Tbar_up);
    const Sym2& m = chi ? tf.chi[q] : tf.chibar[q];
    const double sg = chi ? 1.0 : -1.0;
    const auto lam = relative_eigenvalues(node_tuple(fd.geom.sigma, m, m).sigma,
                                          {sg * m[0], sg * m[1], sg * m[1], sg * m[2]}, n - 1);
    if (!gamma_cone_member(lam, k)) note_node(cone_bad, q);
    const double signed_p = chi ? P[q] : ((k % 2 == 0) ? P[q] : -P[q]);
    if (!(signed_p > 0.0)) note_node(sign_bad, q);
  }
  if (!cone_bad.empty()) {
    hyp_ok = false;
    rep.notes.push_back(std::string(chi ? "chi" : "-chibar") + " not in Gamma_" + std::to_string(k) +
                        " at nodes " + node_list(cone_bad));
  }
  if (!sign_bad.empty()) {
    hyp_ok = false;
    rep.notes.push_back("sign condition on P fails at nodes " + node_list(sign_bad));
  }
  if (!cc) {
    const HypothesisFlags h = schwarzschild_hypotheses(ev);
    if (!divergence_sign_applies(h, k, family)) {
      hyp_ok = false;
      rep.notes.push_back("no divergence-sign case applies");
    }
  }
  const CovectorField dP = differential(P);
  ScalarField g(s.grid);
  for (int q = 0; q < g.size(); ++q) {
    const FrameData& fd = s.frames[q];
    const Vec4& N = chi ? tf.L[q] : tf.Lbar[q];
    // chibar family: Newton tensor of -chibar, i.e. -Tbar
    g[q] = (chi ? 1.0 : -1.0) * Qr(fd, apply_upper(fd, T[q], dP[q]), N) / (P[q] * P[q]);
  }
  sum_terms(rep, s, {{"P^-2 Q(T(grad P),N)", g}});
  rep.scale = abs_integral(g, s);
  rep.relative = relative_of(rep.value, rep.scale);
  const bool holds = criterion_holds(rep, tol);
  rep.verdict = holds ? Verdict::inequality_ok : Verdict::strict_positive;

  // chi family pairs with the outgoing inequality, chibar with the incoming one
  double shear = 0.0;
  for (int q = 0; q < s.grid->size(); ++q) {
    const FrameData& fd = s.frames[q];
    shear = std::max(shear, trace_free_norm(fd.geom.sigma, fd.geom.sigma_inv, chi ? tf.chi[q] : tf.chibar[q]));
  }
  rep.diagnostics["shear_deficit_max"] = shear;
  if (s.h_ok) {
    const IdentityReport hk = hk_functional(ev, chi ? Branch::outgoing : Branch::incoming);
    rep.diagnostics["hk_value"] = hk.value;
    rep.diagnostics["hk_scale"] = hk.scale;
  }
  const bool symmetric = !cc && s.st.mass() > 0.0;
  if (holds && shear <= tol.shear)
    rep.classification = symmetric ? "null_hypersurface_of_symmetry" : "shear_free";
  else if (!holds)
    rep.classification = "not_shear_free";
  else
    rep.classification = "inconclusive";
  rep.notes.push_back(std::string(chi ? "past" : "future") + " incoming null embeddedness assumed, not checked");
  if (!hyp_ok) rep.verdict = Verdict::hypotheses_failed;
  return rep;
}

IdentityReport mixed_rs_criterion(const Evaluation& ev, int r, int s_) {
  const SurfaceData& s = ev.surface();
  if (!s.st.constant_curvature()) throw PreconditionError("the mixed criterion needs a constant-curvature spacetime");
  const int n = s.st.n();
  if (r < 1 || s_ < 1) throw PreconditionError("the mixed criterion needs r, s > 0");
  check_rs(r, s_, n);
  char name[64];
  std::snprintf(name, sizeof name, "mixed_rs_%d_%d", r, s_);
  IdentityReport rep = start(name, s);
  const Tolerances& tol = ev.tolerances();
  bool hyp_ok = torsion_hypothesis(rep, ev);
  const TorsionFreeFrame& tf = ev.torsion_free();
  const int d = n - 1;
  ScalarField Hrs(s.grid), gap(s.grid);
  Sym2Field T(s.grid);
  std::vector<int> cone_bad, quad_bad, literal_bad;
  double umb = 0.0, amin = INFINITY, amax = -INFINITY, shear_in = 0.0;
  for (int q = 0; q < s.grid->size(); ++q) {
    const FrameData& fd = s.frames[q];
    const Sym2& chi = tf.chi[q];
    const Sym2& chib = tf.chibar[q];
    const NodeAlgebra na = node_algebra(fd, chi, chib, r, s_);
    const NodeAlgebra n0s = node_algebra(fd, chi, chib, 0, s_);
    Hrs[q] = na.m.h(r, s_);
    T[q] = pack_upper(na.t.T_up);
    const double trchi = trace(fd.geom.sigma_inv, chi);
    gap[q] = na.m.h(r - 1, s_) / na.m.h(r, s_) - (n - 1.0) / trchi;
    const auto sig = node_tuple(fd.geom.sigma, chi, chib).sigma;
    const auto lc = relative_eigenvalues(sig, {chi[0], chi[1], chi[1], chi[2]}, d);
    const auto lb = relative_eigenvalues(sig, {-chib[0], -chib[1], -chib[1], -chib[2]}, d);
    if (!gamma_cone_member(lc, r + s_) || !gamma_cone_member(lb, r + s_)) note_node(cone_bad, q);
    // chibar_ab Tbar_{0,s}^{bc} chi_c^a
    const Sym2 Tb = pack_upper(n0s.t.Tbar_up);
    const auto chim = mixed(fd.geom.sigma_inv, chi);  // chi_c^a as chim[c][a]
    const double cb[2][2] = {{chib[0], chib[1]}, {chib[1], chib[2]}};
    const double tb[2][2] = {{Tb[0], Tb[1]}, {Tb[1], Tb[2]}};
    double quad = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) quad += cb[a][b] * tb[b][c] * chim[c][a];
    const double prod = n0s.m.h(0, s_) * na.m.h(1, 0);
    if (!(quad <= (n - 1.0) * prod + tol.pointwise)) note_node(quad_bad, q);
    if (!(quad >= prod - tol.pointwise)) note_node(literal_bad, q);
    umb = std::max(umb, trace_free_norm(fd.geom.sigma, fd.geom.sigma_inv, chi));
    shear_in = std::max(shear_in, trace_free_norm(fd.geom.sigma, fd.geom.sigma_inv, chib));
    amin = std::min(amin, trchi / d);
    amax = std::max(amax, trchi / d);
  }
  if (!cone_bad.empty()) {
    hyp_ok = false;
    rep.notes.push_back("chi or -chibar not in Gamma_" + std::to_string(r + s_) + " at nodes " + node_list(cone_bad));
  }
  if (!quad_bad.empty()) {
    hyp_ok = false;
    rep.notes.push_back("quadratic hypothesis fails at nodes " + node_list(quad_bad));
  }
  rep.diagnostics["literal_quadratic_hypothesis_holds"] = literal_bad.empty() ? 1.0 : 0.0;
  const CovectorField dH = differential(Hrs);
  ScalarField g(s.grid);
  for (int q = 0; q < g.size(); ++q) {
    const FrameData& fd = s.frames[q];
    g[q] = Qr(fd, apply_upper(fd, T[q], dH[q]), tf.L[q]) / (Hrs[q] * Hrs[q]);
  }
  sum_terms(rep, s, {{"H^-2 Q(T(grad H),L)", g}});
  rep.scale = abs_integral(g, s);
  rep.relative = relative_of(rep.value, rep.scale);
  const bool holds = criterion_holds(rep, tol);
  rep.verdict = holds ? Verdict::inequality_ok : Verdict::strict_positive;
  double gmin = INFINITY;
  for (int q = 0; q < gap.size(); ++q) gmin = std::min(gmin, gap[q]);
  rep.diagnostics["gap_min"] = gmin;
  rep.diagnostics["chi_umbilicity_max"] = umb;
  rep.diagnostics["chibar_shear_max"] = shear_in;
  // Codazzi: with chi = alpha sigma, alpha must be constant
  rep.diagnostics["alpha_variation"] = amax - amin;
  rep.fields.emplace_back("gap", gap);
  if (holds && hyp_ok && umb <= tol.shear && shear_in <= tol.shear)
    rep.classification = "sphere_of_symmetry";
  else if (!holds)
    rep.classification = "not_sphere_of_symmetry";
  else
    rep.classification = "inconclusive";
  rep.notes.push_back("past incoming null embeddedness assumed, not checked");
  if (!hyp_ok) rep.verdict = Verdict::hypotheses_failed;
  return rep;
}

}  // namespace nullgeo
