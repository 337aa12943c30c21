#include "nullgeo/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

namespace nullgeo {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // refresh the derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int l = 2; l <= n; ++l) {
      const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[k] = x;
    weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::vector<double> fornberg_first_derivative(double x0, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  // c[j][m] for derivative orders m = 0, 1
  std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][1];
  return w;
}

GridSpec::GridSpec(int n_theta, int n_phi, int fd_order)
    : n_theta_(n_theta), n_phi_(n_phi), order_(fd_order) {
  if (n_theta < 8) throw PreconditionError("n_theta must be >= 8");
  if (n_phi < 16 || n_phi % 2 != 0) throw PreconditionError("n_phi must be even and >= 16");
  if (fd_order != 4 && fd_order != 8) throw PreconditionError("finite-difference order must be 4 or 8");
  dphi_ = 2.0 * M_PI / n_phi;
  gauss_legendre(n_theta, mu_, w_);  // descending mu = ascending theta
  theta_.resize(n_theta);
  node_w_.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    theta_[i] = std::acos(mu_[i]);
    node_w_[i] = w_[i] * dphi_ / std::sqrt(1.0 - mu_[i] * mu_[i]);
  }
  const int half = fd_order / 2, width = fd_order + 1;
  std::vector<double> offs(width);
  for (int q = 0; q < width; ++q) offs[q] = q - half;
  phi_w_ = fornberg_first_derivative(0.0, offs);
  for (double& w : phi_w_) w /= dphi_;
  stencil_.resize(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    ThetaStencil& s = stencil_[i];
    s.row.resize(width);
    s.flipped.resize(width);
    std::vector<double> xs(width);
    for (int q = 0; q < width; ++q) {
      const int k = i - half + q;
      if (k < 0) {
        s.row[q] = -k - 1;
        s.flipped[q] = true;
        xs[q] = -theta_[-k - 1];
      } else if (k >= n_theta) {
        s.row[q] = 2 * n_theta - 1 - k;
        s.flipped[q] = true;
        xs[q] = 2.0 * M_PI - theta_[2 * n_theta - 1 - k];
      } else {
        s.row[q] = k;
        s.flipped[q] = false;
        xs[q] = theta_[k];
      }
    }
    s.weight = fornberg_first_derivative(theta_[i], xs);
  }
}

std::shared_ptr<const GridSpec> GridSpec::make(int n_theta, int n_phi, int fd_order) {
  return std::shared_ptr<const GridSpec>(new GridSpec(n_theta, n_phi, fd_order));
}

int thread_count() {
  const char* env = std::getenv("NULLGEO_THREADS");
  if (!env || !*env) return 1;
  const long v = std::strtol(env, nullptr, 10);
  return static_cast<int>(std::clamp(v, 1L, 256L));
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(thread_count(), std::max(n, 1));
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (int k = lo; k < hi; ++k) body(k);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

ScalarField sample(const GridPtr& grid, const std::function<double(double, double)>& fn) {
  ScalarField out(grid);
  for (int i = 0; i < grid->n_theta(); ++i)
    for (int j = 0; j < grid->n_phi(); ++j) out[grid->index(i, j)] = fn(grid->theta(i), grid->phi(j));
  return out;
}

double integrate(const ScalarField& field, const ScalarField& area_density) {
  require_same_grid(field.grid, area_density.grid);
  const GridSpec& g = *field.grid;
  std::vector<double> terms(g.size());
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) {
      const int k = g.index(i, j);
      terms[k] = g.node_weight(i) * field[k] * area_density[k];
    }
  return pairwise_sum(terms);
}

double integrate(const ScalarField& field, const GeometryField& geometry) {
  ScalarField area(geometry.grid);
  for (int k = 0; k < area.size(); ++k) area[k] = geometry[k].area_density;
  return integrate(field, area);
}

std::vector<double> d_theta(const GridSpec& g, const std::vector<double>& f, int parity) {
  const int nt = g.n_theta(), np = g.n_phi(), half = np / 2;
  std::vector<double> out(g.size(), 0.0);
  for (int i = 0; i < nt; ++i) {
    const auto& s = g.theta_stencil(i);
    for (int j = 0; j < np; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < s.weight.size(); ++q) {
        const double v = s.flipped[q] ? parity * f[g.index(s.row[q], (j + half) % np)]
                                      : f[g.index(s.row[q], j)];
        acc += s.weight[q] * v;
      }
      out[g.index(i, j)] = acc;
    }
  }
  return out;
}

std::vector<double> d_phi(const GridSpec& g, const std::vector<double>& f) {
  const int nt = g.n_theta(), np = g.n_phi(), half = g.half_width();
  const auto& w = g.phi_weights();
  std::vector<double> out(g.size(), 0.0);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j) {
      double acc = 0.0;
      for (int q = -half; q <= half; ++q)
        if (q != 0) acc += w[q + half] * f[g.index(i, ((j + q) % np + np) % np)];
      out[g.index(i, j)] = acc;
    }
  return out;
}

CovectorField differential(const ScalarField& f) {
  const auto dt = d_theta(*f.grid, f.values, +1);
  const auto dp = d_phi(*f.grid, f.values);
  CovectorField out(f.grid);
  for (int k = 0; k < out.size(); ++k) out[k] = {dt[k], dp[k]};
  return out;
}

GradientField tangential_gradient(const ScalarField& f, const GeometryField& geometry) {
  require_same_grid(f.grid, geometry.grid);
  GradientField out{differential(f), CovectorField(f.grid)};
  for (int k = 0; k < f.size(); ++k) {
    const Sym2& si = geometry[k].sigma_inv;
    const Covector& d = out.covector[k];
    out.vector[k] = {si[0] * d[0] + si[1] * d[1], si[1] * d[0] + si[2] * d[1]};
  }
  return out;
}

CovectorField covariant_divergence(const Sym2Field& t_up, const GeometryField& geometry) {
  require_same_grid(t_up.grid, geometry.grid);
  const GridSpec& g = *t_up.grid;
  const int n = g.size();
  std::vector<double> a00(n), a01(n), a11(n);
  for (int k = 0; k < n; ++k) {
    const double s = geometry[k].area_density;
    a00[k] = s * t_up[k][0];
    a01[k] = s * t_up[k][1];
    a11[k] = s * t_up[k][2];
  }
  // parities: sqrt(det sigma) odd, T^{00} even, T^{01} odd, T^{11} even
  const auto d0_00 = d_theta(g, a00, -1);
  const auto d1_01 = d_phi(g, a01);
  const auto d0_01 = d_theta(g, a01, +1);
  const auto d1_11 = d_phi(g, a11);
  CovectorField out(t_up.grid);
  for (int k = 0; k < n; ++k) {
    const auto& gm = geometry[k].gamma;
    const Sym2& t = t_up[k];
    const double tt[2][2] = {{t[0], t[1]}, {t[1], t[2]}};
    const double inv_s = 1.0 / geometry[k].area_density;
    std::array<double, 2> v{(d0_00[k] + d1_01[k]) * inv_s, (d0_01[k] + d1_11[k]) * inv_s};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) v[a] += gm[a][b][c] * tt[b][c];
    out[k] = v;
  }
  return out;
}

ScalarField exterior_derivative_1form(const CovectorField& omega) {
  const GridSpec& g = *omega.grid;
  std::vector<double> w0(g.size()), w1(g.size());
  for (int k = 0; k < g.size(); ++k) {
    w0[k] = omega[k][0];
    w1[k] = omega[k][1];
  }
  const auto a = d_theta(g, w1, +1);
  const auto b = d_phi(g, w0);
  ScalarField out(omega.grid);
  for (int k = 0; k < g.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

ScalarField sigma_norm(const CovectorField& omega, const GeometryField& geometry) {
  require_same_grid(omega.grid, geometry.grid);
  ScalarField out(omega.grid);
  for (int k = 0; k < out.size(); ++k) {
    const Sym2& si = geometry[k].sigma_inv;
    const Covector& w = omega[k];
    out[k] = std::sqrt(std::max(0.0, si[0] * w[0] * w[0] + 2.0 * si[1] * w[0] * w[1] + si[2] * w[1] * w[1]));
  }
  return out;
}

}  // namespace nullgeo
