#include "nullgeo/curvature_algebra.hpp"

#include <Eigen/Eigenvalues>

namespace nullgeo {

std::vector<double> elementary_symmetric(const std::vector<double>& lambda) {
  std::vector<double> e(lambda.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t k = i + 1; k >= 1; --k) e[k] += lambda[i] * e[k - 1];
  return e;
}

bool gamma_cone_member(const std::vector<double>& eigenvalues, int k) {
  if (k < 1 || k > static_cast<int>(eigenvalues.size()))
    throw PreconditionError("cone index k must be in 1..dim");
  const auto e = elementary_symmetric(eigenvalues);
  for (int j = 1; j <= k; ++j)
    if (!(e[j] > 0.0)) return false;
  return true;
}

std::vector<double> relative_eigenvalues(const std::vector<double>& sigma, const std::vector<double>& a,
                                         int dim) {
  Eigen::MatrixXd S(dim, dim), A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      S(i, j) = sigma[static_cast<std::size_t>(i) * dim + j];
      A(i, j) = a[static_cast<std::size_t>(i) * dim + j];
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw PreconditionError("sigma is not positive definite");
  std::vector<double> out(dim);
  for (int i = 0; i < dim; ++i) out[i] = es.eigenvalues()[i];
  return out;
}

bool gamma_cone_member(const std::vector<double>& sigma, const std::vector<double>& a, int dim, int k) {
  return gamma_cone_member(relative_eigenvalues(sigma, a, dim), k);
}

GapResult newton_maclaurin_gap(const CurvTuple<double>& ct, int r, int s) {
  if (r < 2 || s < 0 || r + s > ct.dim)
    throw PreconditionError("Newton-Maclaurin gap needs r >= 2 and r + s <= dim");
  const MixedCurvatures<double> m = mixed_curvatures(ct);
  GapResult out;
  out.gap = m.h(r - 1, s) * m.h(r - 1, s) - m.h(r, s) * m.h(r - 2, s);
  const int k = r + s - 1;
  out.precondition_ok = gamma_cone_member(ct.sigma, ct.chi, ct.dim, k) &&
                        gamma_cone_member(ct.sigma, ct.chibar, ct.dim, k);
  return out;
}

}  // namespace nullgeo
