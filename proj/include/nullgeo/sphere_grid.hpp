#pragma once

// Gauss-Legendre x uniform-azimuth grid on the parameter sphere, quadrature,
// and centered finite-difference tangential calculus (order 4 or 8, default 8).
//
// Node (i, j) sits at theta_i = arccos(mu_i) (ascending in theta) and
// phi_j = j * 2 pi / n_phi. Stencils crossing a pole continue through
// (theta, phi) -> (-theta, phi + pi); each field carries a parity telling how
// its coordinate components transform under that continuation.

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "nullgeo/errors.hpp"

namespace nullgeo {

class GridSpec {
 public:
  static constexpr int kDefaultOrder = 8;
  static std::shared_ptr<const GridSpec> make(int n_theta, int n_phi, int fd_order = kDefaultOrder);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  int size() const { return n_theta_ * n_phi_; }
  int index(int i, int j) const { return i * n_phi_ + j; }

  double theta(int i) const { return theta_[i]; }
  double mu(int i) const { return mu_[i]; }
  double gl_weight(int i) const { return w_[i]; }
  double phi(int j) const { return j * dphi_; }
  double dphi() const { return dphi_; }
  /// Weight of a node for the coordinate measure dtheta dphi.
  double node_weight(int i) const { return node_w_[i]; }

  int fd_order() const { return order_; }
  int half_width() const { return order_ / 2; }

  struct ThetaStencil {
    std::vector<int> row;
    std::vector<bool> flipped;  // ghost row reached across a pole
    std::vector<double> weight;
  };
  const ThetaStencil& theta_stencil(int i) const { return stencil_[i]; }
  /// Weights for offsets -half..half in phi, already divided by dphi.
  const std::vector<double>& phi_weights() const { return phi_w_; }

  bool same_as(const GridSpec& o) const {
    return n_theta_ == o.n_theta_ && n_phi_ == o.n_phi_ && order_ == o.order_;
  }

 private:
  GridSpec(int n_theta, int n_phi, int fd_order);

  int n_theta_;
  int n_phi_;
  int order_;
  double dphi_;
  std::vector<double> theta_, mu_, w_, node_w_, phi_w_;
  std::vector<ThetaStencil> stencil_;
};

using GridPtr = std::shared_ptr<const GridSpec>;

/// Gauss-Legendre nodes and weights on [-1, 1], nodes descending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Finite-difference weights for the first derivative at x0 from arbitrary nodes.
std::vector<double> fornberg_first_derivative(double x0, const std::vector<double>& x);

template <class T>
struct SurfaceField {
  GridPtr grid;
  std::vector<T> values;

  SurfaceField() = default;
  explicit SurfaceField(GridPtr g, T fill = T{}) : grid(std::move(g)), values(grid->size(), fill) {}
  T& operator[](int k) { return values[k]; }
  const T& operator[](int k) const { return values[k]; }
  int size() const { return static_cast<int>(values.size()); }
};

using ScalarField = SurfaceField<double>;
using Covector = std::array<double, 2>;
using CovectorField = SurfaceField<Covector>;
/// Symmetric 2x2 in packed order (00, 01, 11).
using Sym2 = std::array<double, 3>;
using Sym2Field = SurfaceField<Sym2>;

/// Per-node intrinsic data the differential operators need.
struct IntrinsicGeometry {
  Sym2 sigma{};
  Sym2 sigma_inv{};
  double area_density = 0.0;             // sqrt(det sigma)
  std::array<std::array<std::array<double, 2>, 2>, 2> gamma{};  // gamma[a][b][c]
};
using GeometryField = SurfaceField<IntrinsicGeometry>;

/// Worker count from NULLGEO_THREADS (default 1, clamped to [1, 256]).
int thread_count();
/// Runs body(k) for k in [0, n) on contiguous chunks; the first failure by index is rethrown.
void parallel_for(int n, const std::function<void(int)>& body);

/// Deterministic pairwise (tree) sum.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

/// Build a scalar field from fn(theta, phi).
ScalarField sample(const GridPtr& grid, const std::function<double(double, double)>& fn);

/// sum_nodes w * value * area_density.
double integrate(const ScalarField& field, const ScalarField& area_density);
double integrate(const ScalarField& field, const GeometryField& geometry);

/// Partial derivatives of a field whose values have the given pole parity (+1 or -1).
std::vector<double> d_theta(const GridSpec& grid, const std::vector<double>& f, int parity);
std::vector<double> d_phi(const GridSpec& grid, const std::vector<double>& f);

/// Coordinate differential of a scalar field (even parity).
CovectorField differential(const ScalarField& f);

struct GradientField {
  CovectorField covector;  // d_a f
  CovectorField vector;    // sigma^{ab} d_b f
};
GradientField tangential_gradient(const ScalarField& f, const GeometryField& geometry);

/// nabla_b T^{ab} for T packed as (T^00, T^01, T^11).
CovectorField covariant_divergence(const Sym2Field& t_up, const GeometryField& geometry);

/// (d omega)_{theta phi} = d_theta omega_phi - d_phi omega_theta.
ScalarField exterior_derivative_1form(const CovectorField& omega);

/// Max-norm of a scalar field.
double max_abs(const ScalarField& f);

/// |omega|_sigma at every node.
ScalarField sigma_norm(const CovectorField& omega, const GeometryField& geometry);

inline void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b || !a->same_as(*b)) throw PreconditionError("fields live on different grids");
}

}  // namespace nullgeo
