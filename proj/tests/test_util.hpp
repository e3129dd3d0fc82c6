#pragma once

#include "opgx/linalg.hpp"
#include "opgx/samplers.hpp"

#include <vector>

namespace opgx::test {

inline HermitianMatrix random_hermitian(int n, Rng& rng) {
  const CMatrix g = random_gaussian(n, n, rng);
  return HermitianMatrix(CMatrix(0.5 * (g + g.adjoint())));
}

inline HermitianMatrix diag(std::initializer_list<double> values) {
  const std::vector<double> v(values);
  return HermitianMatrix::diagonal(v);
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_diff(const HermitianMatrix& a, const HermitianMatrix& b) {
  const double scale = std::max(a.frobenius_norm(), b.frobenius_norm());
  return (a.matrix() - b.matrix()).norm() / (scale > 0.0 ? scale : 1.0);
}

}  // namespace opgx::test
