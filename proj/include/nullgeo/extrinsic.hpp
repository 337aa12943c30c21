#pragma once

// Pointwise extrinsic geometry of a graph surface in a 3+1 warped spacetime,
// and the grid-level quantities built from it.
//
// Two normal frames are carried at every node:
//   * the Gram-Schmidt frame (e_n from d/dr, e_{n+1} from d/dt) with its null
//     pair ell = e_{n+1} + e_n, ellbar = e_{n+1} - e_n, which exists for any
//     spacelike surface and whose torsion beta = <D e_n, e_{n+1}> is exact from
//     the 2-jet;
//   * the mean-curvature frame L = (-H + J)/|H|, Lbar = (H + J)/|H|, which is
//     e^w ell, e^{-w} ellbar with e^w = -(h_n + h_{n+1})/|H|.
// All 2-tensors are in the coordinate basis (d/dtheta F, d/dphi F).

#include <array>
#include <optional>
#include <string>

#include "nullgeo/autodiff.hpp"
#include "nullgeo/sphere_grid.hpp"
#include "nullgeo/spacetime.hpp"
#include "nullgeo/surface.hpp"

namespace nullgeo {

using Vec4 = std::array<double, 4>;

struct FrameOptions {
  double eps_H = 1e-10;
};

enum class HFrameStatus { ok, degenerate, past_directed };
const char* to_string(HFrameStatus s);

struct FrameData {
  Point position;
  Vec4 g{};                      // metric diagonal
  std::array<Vec4, 2> X{};       // coordinate tangents
  IntrinsicGeometry geom;        // sigma, sigma_inv, sqrt(det sigma), induced Christoffels
  std::array<Vec4, 2> e_tan{};   // sigma-orthonormal tangent pair
  Vec4 e_n{}, e_np1{};           // unit spacelike / future unit timelike normals
  std::array<std::array<Vec4, 2>, 2> II{};
  Vec4 H{}, J{};
  double h_n = 0.0, h_np1 = 0.0;  // H = h_n e_n + h_np1 e_np1
  double normH2 = 0.0;            // <H, H>
  double normH = 0.0;             // sqrt(max(<H,H>, 0))

  // Gram-Schmidt null pair
  Vec4 ell{}, ellbar{};
  Sym2 chi_gs{}, chibar_gs{};
  Covector beta{};

  // mean-curvature gauge; valid when hstatus == ok
  HFrameStatus hstatus = HFrameStatus::degenerate;
  double w = 0.0;
  Vec4 L{}, Lbar{};
  Sym2 chi{}, chibar{};
};

double inner(const Vec4& g, const Vec4& x, const Vec4& y);
/// Q(X, Y) = r (X^r Y^t - X^t Y^r).
double Q(double r, const Vec4& x, const Vec4& y);

FrameData frame_at(const Spacetime& st, const Jet2& jet, const FrameOptions& opts = {});

/// Same FrameData but with the Gram-Schmidt torsion computed by central
/// differences of the frame along the surface (used as an oracle).
Covector beta_by_differences(const Spacetime& st, const SurfaceSpec& spec, double theta, double phi,
                             double step = 1e-4);

enum class NullDirection { incoming, outgoing };

/// sigma-norm of the trace-free part of chibar (incoming) or chi (outgoing), in
/// the mean-curvature gauge when it is valid and the Gram-Schmidt gauge otherwise.
double shear_deficit(const FrameData& fd, NullDirection which);

/// A surface evaluated on a grid.
struct SurfaceData {
  Spacetime st;
  SurfaceSpec spec;
  GridPtr grid;
  FrameOptions opts;
  SurfaceField<FrameData> frames;
  GeometryField geometry;
  CovectorField beta;
  bool h_ok = false;            // mean-curvature gauge valid at every node
  std::string h_diagnostic;     // first failure otherwise
  CovectorField alphaH;         // beta - dw, filled when h_ok
  ScalarField w;                // log scale of the H frame, filled when h_ok
};

/// Evaluates jets and frames on every node. DomainError when r leaves the
/// admissible range, PreconditionError when the induced metric is not positive.
SurfaceData build_surface(const Spacetime& st, const SurfaceSpec& spec, const GridPtr& grid,
                          const FrameOptions& opts = {});

/// Throws PreconditionError("mean curvature not spacelike/degenerate ...") unless h_ok.
void require_h_frame(const SurfaceData& s);

ScalarField field_of(const SurfaceData& s, double (*fn)(const FrameData&));

/// Ambient vector with its angular part stored as a vector in R^3 tangent to
/// the unit sphere; every component is a smooth function on the sphere.
struct Lifted {
  double vt = 0.0;
  double vr = 0.0;
  std::array<double, 3> w{};
};

Lifted lift(const FrameData& fd, const Vec4& v);
double lifted_inner(const Spacetime& st, const FrameData& fd, const Lifted& a, const Lifted& b);

/// D_{d_a F} V for a vector field along the surface, by grid differences of the lifted components.
std::array<SurfaceField<Lifted>, 2> lifted_derivative(const SurfaceData& s,
                                                      const SurfaceField<Lifted>& v);

struct CheckResult {
  double max_abs = 0.0;
  ScalarField field;
};

/// max over nodes and a of |(d log|H| - alpha_H)(e_a) - 1/2 <D_{e_a} Lbar', L'>|,
/// Lbar' = (H + J)/|H|^2, L' = -H + J; the right side comes from lifted differences.
CheckResult dlogH_minus_alpha_check(const SurfaceData& s);

struct GaugeSolution {
  ScalarField h;
  double residual = 0.0;  // sqrt(int |grad h - zeta|^2)
  int iterations = 0;
};

/// Least-squares h with grad h ~ zeta and zero mean.
GaugeSolution solve_gauge(const CovectorField& zeta, const GeometryField& geometry);

/// Torsion 1/2 <D(e^h ell), e^{-h} ellbar> of the rescaled Gram-Schmidt pair,
/// recomputed from lifted differences (independent of beta - dh).
CovectorField torsion_after_rescaling(const SurfaceData& s, const ScalarField& h);

/// Null frame fixed by the gauge solve: L = e^h ell, Lbar = e^{-h} ellbar.
struct TorsionFreeFrame {
  GaugeSolution gauge;
  SurfaceField<Vec4> L, Lbar;
  Sym2Field chi, chibar;
  CovectorField zeta;       // beta - dh
  double zeta_norm = 0.0;   // max |zeta|_sigma from lifted differences
};
TorsionFreeFrame torsion_free_frame(const SurfaceData& s);

/// d zeta for the Gram-Schmidt pair rescaled by e^u (u an expression in theta, phi, t, r).
ScalarField dzeta_field(const SurfaceData& s, const ScalarField& u);

/// Ricci-identity prediction of (d zeta)_{theta phi} for the Gram-Schmidt pair:
/// 1/2 [<R(X_theta, X_phi) ell, ellbar> + chi_phi^c chibar_{theta c} - chi_theta^c chibar_{phi c}].
ScalarField dzeta_ricci(const SurfaceData& s);

/// sigma^{-1} M sigma^{-1} for a lower-index symmetric tensor.
Sym2 raise_both(const Sym2& sigma_inv, const Sym2& m);
/// Mixed components M_a^c = M_ab sigma^{bc} as a full 2x2 matrix.
std::array<std::array<double, 2>, 2> mixed(const Sym2& sigma_inv, const Sym2& m);

}  // namespace nullgeo
