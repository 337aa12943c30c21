#pragma once

// Integral identities, inequalities and classification criteria assembled
// from grid fields.
//
// Conventions (n = 3, Q = r dr ^ dt, xi = -n d/dt):
//   * identity residuals carry their constituent integrals in `terms`;
//     scale = sum |terms|, relative = value / scale;
//   * inequalities and criteria are judged against tol * scale with an
//     absolute floor, so an integrand that vanishes identically is not at the
//     mercy of roundoff in its last bit.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nullgeo/curvature_algebra.hpp"
#include "nullgeo/expr.hpp"
#include "nullgeo/extrinsic.hpp"

namespace nullgeo {

enum class Verdict { identity_ok, inequality_ok, strict_positive, violated, hypotheses_failed };
const char* to_string(Verdict v);

enum class Branch { incoming, outgoing };
const char* to_string(Branch b);

/// chi_family: the L equations with T_{r,0}; chibar_family: the Lbar equations with Tbar_{0,s}.
enum class Family { chi_family, chibar_family };
const char* to_string(Family f);

struct Tolerances {
  double identity = 1e-6;     // relative residual of an exact identity
  double inequality = 1e-6;   // margin, times scale
  double equality = 1e-5;     // equality detection, times scale
  double shear = 1e-5;        // pointwise shear deficit for a shear-free verdict
  double dzeta = 1e-6;        // |d zeta| for the torsion-free hypothesis
  double gauge = 1e-6;        // gauge least-squares residual
  double pointwise = 1e-10;   // nodewise sign tests
  double abs_floor = 1e-12;   // absolute floor added to every tol * scale

  bool operator==(const Tolerances&) const = default;
};

struct IdentityReport {
  std::string check;
  double value = 0.0;
  double scale = 0.0;
  double relative = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  int n_theta = 0, n_phi = 0;
  std::optional<double> refined_value, refined_relative;
  int refined_n_theta = 0, refined_n_phi = 0;
  Verdict verdict = Verdict::violated;
  std::string classification;                   // criteria only
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;               // failed or assumed hypotheses
  std::vector<std::pair<std::string, ScalarField>> fields;  // per-node dumps
};

/// relative = value / scale, 0 when both vanish.
double relative_of(double value, double scale);

/// Copies the refined-grid value into `base`.
void attach_refined(IdentityReport& base, const IdentityReport& refined);

struct HypothesisFlags {
  bool H_spacelike = false;
  bool Q_LLbar_nonneg = false;
  bool chi_positive = false;
  bool chibar_neg_positive = false;
  bool QsqL_cond = false;      // Q^2(L, v) Q(L, v) <= 0
  bool QsqLbar_cond = false;   // Q^2(Lbar, v) Q(Lbar, v) >= 0
  bool dzeta_zero = false;
  double dzeta_max = 0.0;
  double gauge_residual = 0.0;
  // (k, chi in Gamma_k, -chibar in Gamma_k) for k = 1..n-1
  std::vector<std::pair<int, std::pair<bool, bool>>> cone_membership;
  std::map<std::string, std::vector<int>> failing_nodes;  // first few offenders per flag

  bool case1() const { return Q_LLbar_nonneg; }
  bool case2() const { return chi_positive && QsqL_cond; }
  bool case3() const { return chibar_neg_positive && QsqLbar_cond; }
};

/// A surface on a grid plus the lazily computed torsion-free frame.
class Evaluation {
 public:
  Evaluation(const Spacetime& st, const SurfaceSpec& spec, const GridPtr& grid,
             const Tolerances& tol = {}, const FrameOptions& opts = {});

  const SurfaceData& surface() const { return *surface_; }
  const Spacetime& spacetime() const { return surface_->st; }
  const GridPtr& grid() const { return surface_->grid; }
  const Tolerances& tolerances() const { return tol_; }
  /// Gauge solve on first use.
  const TorsionFreeFrame& torsion_free() const;
  /// Hodge-dual d zeta (d zeta_{theta phi} / sqrt det sigma) of the Gram-Schmidt pair.
  const ScalarField& dzeta() const;

 private:
  std::shared_ptr<const SurfaceData> surface_;
  Tolerances tol_;
  mutable std::once_flag tf_once_, dz_once_;
  mutable std::shared_ptr<TorsionFreeFrame> tf_;
  mutable std::shared_ptr<ScalarField> dz_;
};

// ---- weights -------------------------------------------------------------

struct Weight {
  enum class Kind { expression, inverse_norm_H, inverse_H_rs };
  Kind kind = Kind::expression;
  std::string text;
  ExprPtr expr;  // kind == expression; may use theta, phi, t, r
  int r = 0, s = 0;
};

/// "1/|H|", "1/H_{r,s}" or an expression in theta, phi, t, r.
Weight parse_weight(const std::string& text);

struct WeightField {
  ScalarField value;
  CovectorField grad;  // coordinate differential d_a f
};

/// Expressions are differentiated exactly along the surface; designators by grid differences.
WeightField resolve_weight(const Evaluation& ev, const Weight& w);

/// An expression in theta, phi, t, r evaluated with its exact surface differential.
WeightField expression_field(const SurfaceData& s, const Expr& e);

// ---- per-node curvature algebra ------------------------------------------

/// 2x2 tuple (sigma, chi, chibar) at a node.
CurvTuple<double> node_tuple(const Sym2& sigma, const Sym2& chi, const Sym2& chibar);

/// Packs the upper-index Newton tensor (symmetric) into (T^00, T^01, T^11).
Sym2 pack_upper(const std::vector<double>& t);

// ---- functionals ------------------------------------------------------------

/// Weighted Minkowski formula for Lbar = e^u ellbar.
IdentityReport minkowski_residual_basic(const Evaluation& ev, const Weight& f, const Expr& u);

/// The +/- forms in the mean-curvature frame.
IdentityReport minkowski_residual_pm(const Evaluation& ev, const Weight& f, Branch branch);

/// Slice surfaces in Minkowski: Euclidean formula and its spacetime counterpart.
IdentityReport euclidean_reduction_check(const Evaluation& ev, const Weight& f);

IdentityReport hk_functional(const Evaluation& ev, Branch branch);

IdentityReport alexandrov_criterion(const Evaluation& ev, Branch branch);

/// r-family (chi_family, r >= 1) or s-family (chibar_family, s >= 1) identity in the torsion-free frame.
IdentityReport higher_minkowski_residual(const Evaluation& ev, const Weight& f, int r, int s,
                                         Family family);

struct DzetaInvariance {
  double invariance = 0.0;  // max |d zeta(e^u) - d zeta(1)|
  double ricci_diff = 0.0;  // max |d zeta - Ricci-identity prediction|
  double dzeta_max = 0.0;
};
DzetaInvariance dzeta_invariance(const Evaluation& ev, const Expr& u);

HypothesisFlags schwarzschild_hypotheses(const Evaluation& ev);

IdentityReport schwarzschild_mink_inequality(const Evaluation& ev, const Weight& f, int k, Family family);

IdentityReport higher_alexandrov_criterion(const Evaluation& ev, int k, Family family);

/// (r, s) with r, s > 0.
IdentityReport mixed_rs_criterion(const Evaluation& ev, int r, int s);

}  // namespace nullgeo
