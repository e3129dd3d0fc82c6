#include "opgx/samplers.hpp"

#include "opgx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opgx {

namespace {

constexpr int kMaxResamples = 50;
// Singular values this close to 1 get a zero defect, so unitary inputs dilate
// to exact block-diagonal form instead of picking up √eps noise.
constexpr double kDefectSnap = 1e-13;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void require_dim(int n, const char* what) {
  if (n < 1) throw UsageError(std::string(what) + ": dimension must be >= 1, got " + std::to_string(n));
}

HermitianMatrix inverse_sqrt(const HermitianMatrix& s) {
  return map_spectrum(s, [](double x) { return 1.0 / std::sqrt(x); });
}

}  // namespace

std::uint64_t SeedSpec::derived() const {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(trial_index + 0x632BE59BD9B4E019ULL));
}

CMatrix random_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  // Column-major fill order, fixed so samples are reproducible.
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

CMatrix unitary_from_gaussian(const CMatrix& g) {
  if (g.rows() != g.cols() || g.rows() < 1) throw UsageError("unitary_from_gaussian: need a square matrix");
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return q;
}

CMatrix random_unitary(int n, Rng& rng) {
  require_dim(n, "random_unitary");
  return unitary_from_gaussian(random_gaussian(n, n, rng));
}

HermitianMatrix random_psd_with_spectrum(int n, const Interval& k, Rng& rng, double cap_width) {
  require_dim(n, "random_psd_with_spectrum");
  const Interval box = k.capped(cap_width);
  const CMatrix u = random_unitary(n, rng);
  if (box.lo == box.hi) return HermitianMatrix::identity(n) * box.lo;
  std::uniform_real_distribution<double> uniform(box.lo, box.hi);
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (double& x : lam) x = uniform(rng);
  return HermitianMatrix::from_spectrum(u, lam);
}

CMatrix contraction_from_gaussian(const CMatrix& g, double shrink) {
  if (!(shrink >= 1.0)) throw UsageError("contraction shrink factor must be >= 1");
  const double norm = spectral_norm(g);
  if (!(norm > 0.0)) return g;
  return g / (norm * shrink);
}

CMatrix random_contraction(int n, Rng& rng, bool isometry) {
  require_dim(n, "random_contraction");
  if (isometry) return random_unitary(n, rng);
  const CMatrix g = random_gaussian(n, n, rng);
  std::uniform_real_distribution<double> uniform(1.0, 2.0);
  return contraction_from_gaussian(g, uniform(rng));
}

CMatrix unitary_dilation(const CMatrix& v, const ToleranceConfig& tol) {
  if (v.rows() != v.cols() || v.rows() < 1) throw UsageError("unitary_dilation: need a square matrix");
  const Eigen::Index n = v.rows();
  Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sigma = svd.singularValues();
  if (sigma(0) > 1.0 + tol.atol) {
    throw UsageError("unitary_dilation: not a contraction (||V||_2 = " + std::to_string(sigma(0)) + ")");
  }
  // V = P Σ Q†; the defects P√(1−Σ²)P† and Q√(1−Σ²)Q† share Σ, which keeps
  // the off-diagonal blocks of W†W cancelling to roundoff.
  RVector defect(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = std::min(sigma(i), 1.0);
    const double gap = (1.0 - s) * (1.0 + s);
    defect(i) = gap < kDefectSnap ? 0.0 : std::sqrt(gap);
  }
  const CMatrix& p = svd.matrixU();
  const CMatrix& q = svd.matrixV();
  const CMatrix d_left = p * defect.cast<Complex>().asDiagonal() * p.adjoint();
  const CMatrix d_right = q * defect.cast<Complex>().asDiagonal() * q.adjoint();

  CMatrix w(2 * n, 2 * n);
  w.topLeftCorner(n, n) = v;
  w.topRightCorner(n, n) = d_left;
  w.bottomLeftCorner(n, n) = d_right;
  w.bottomRightCorner(n, n) = -v.adjoint();
  return w;
}

ContractionPair::ContractionPair(CMatrix c, CMatrix d) : c_(std::move(c)), d_(std::move(d)) {
  if (c_.rows() != c_.cols() || d_.rows() != d_.cols() || c_.rows() != d_.rows() || c_.rows() < 1) {
    throw UsageError("contraction pair: C and D must be square and of equal size");
  }
  const double res = residual();
  if (res > 1e-12 * static_cast<double>(dim())) {
    throw HypothesisError("CC* + DD* = I", "residual " + std::to_string(res) + " exceeds 1e-12*n");
  }
}

double ContractionPair::residual() const {
  const Eigen::Index n = c_.rows();
  return (c_ * c_.adjoint() + d_ * d_.adjoint() - CMatrix::Identity(n, n)).norm();
}

ContractionPair coisometry_from_gaussian(const CMatrix& g) {
  if (g.rows() != g.cols() || g.rows() % 2 != 0) throw UsageError("coisometry needs a 2n x 2n generator");
  const Eigen::Index n = g.rows() / 2;
  const CMatrix u = unitary_from_gaussian(g);
  return ContractionPair(u.topLeftCorner(n, n), u.topRightCorner(n, n));
}

ContractionPair random_coisometry_pair(int n, Rng& rng) {
  require_dim(n, "random_coisometry_pair");
  return coisometry_from_gaussian(random_gaussian(2 * n, 2 * n, rng));
}

HermitianMatrix projection_from_gaussian(const CMatrix& g, int rank) {
  const int n = static_cast<int>(g.rows());
  if (rank < 0 || rank > n) {
    throw UsageError("projection rank " + std::to_string(rank) + " outside [0, " + std::to_string(n) + "]");
  }
  if (rank == 0) return HermitianMatrix::zero(n);
  const CMatrix u = unitary_from_gaussian(g);
  const CMatrix cols = u.leftCols(rank);
  return HermitianMatrix(CMatrix(cols * cols.adjoint()));
}

HermitianMatrix random_projection(int n, int rank, Rng& rng) {
  require_dim(n, "random_projection");
  if (rank < 0 || rank > n) {
    throw UsageError("projection rank " + std::to_string(rank) + " outside [0, " + std::to_string(n) + "]");
  }
  return projection_from_gaussian(random_gaussian(n, n, rng), rank);
}

double ResolutionOfIdentity::residual() const {
  if (operators.empty()) return 0.0;
  const int n = dim();
  CMatrix acc = -CMatrix::Identity(n, n);
  for (std::size_t i = 0; i < operators.size(); ++i) acc += weights[i] * operators[i].matrix();
  return acc.norm();
}

void ResolutionOfIdentity::validate(const Interval& k, const ToleranceConfig& tol) const {
  const std::size_t m = operators.size();
  if (m < 1 || weights.size() != m || points.size() != m) {
    throw UsageError("resolution of identity: weights, operators and points must have equal length >= 1");
  }
  double total = 0.0;
  for (double a : weights) {
    if (!(a > 0.0 && a < 1.0) && !(m == 1 && a == 1.0)) {
      throw HypothesisError("alpha_i in (0,1)", "weight " + std::to_string(a));
    }
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-12) throw HypothesisError("sum alpha_i = 1", "sum is " + std::to_string(total));
  const int n = dim();
  for (const HermitianMatrix& a : operators) {
    if (a.dim() != n) throw UsageError("resolution of identity: operator dimension mismatch");
    if (a.min_eigenvalue() < -1e-12 * std::max(1.0, a.spectral_norm())) {
      throw HypothesisError("A_i positive", "operator has eigenvalue " + std::to_string(a.min_eigenvalue()));
    }
  }
  const double res = residual();
  if (res > 1e-12 * n) throw HypothesisError("sum alpha_i A_i = I", "residual " + std::to_string(res));
  for (double x : points) {
    if (!k.contains_widened(x, tol.atol)) throw HypothesisError("x_i in K", "point " + std::to_string(x));
  }
}

std::vector<double> random_simplex(int k, Rng& rng) {
  if (k < 1) throw UsageError("simplex dimension must be >= 1");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& x : w) {
    // Strictly positive weights even if the exponential returns 0.
    x = std::max(expo(rng), 1e-300);
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

ResolutionOfIdentity resolution_from_gaussians(std::vector<double> weights, const std::vector<CMatrix>& gs,
                                               std::vector<double> points) {
  if (gs.empty() || gs.size() != weights.size()) throw UsageError("resolution: one generator per weight");
  const int n = static_cast<int>(gs.front().rows());
  std::vector<HermitianMatrix> bs;
  CMatrix s = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    bs.emplace_back(CMatrix(gs[i] * gs[i].adjoint() / static_cast<double>(n)));
    s += weights[i] * bs.back().matrix();
  }
  const HermitianMatrix sh(s);
  const RVector ev = sh.eigenvalues();
  if (!(ev(0) > 1e-6 * ev(ev.size() - 1))) {
    throw NumericalError("resolution: S = sum alpha_i B_i is numerically singular", ev(0));
  }
  const CMatrix root = inverse_sqrt(sh).matrix();
  ResolutionOfIdentity res;
  res.weights = std::move(weights);
  res.points = std::move(points);
  for (const HermitianMatrix& b : bs) res.operators.emplace_back(CMatrix(root * b.matrix() * root));
  const double r = res.residual();
  if (r > 1e-12 * n) throw NumericalError("resolution: sum alpha_i A_i deviates from I", r);
  return res;
}

ResolutionOfIdentity random_resolution(int n, int k, const Interval& k_interval, Rng& rng) {
  require_dim(n, "random_resolution");
  if (k < 2) throw UsageError("random_resolution needs k >= 2");
  const Interval box = k_interval.capped();
  std::uniform_real_distribution<double> uniform(box.lo, box.hi);
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    std::vector<double> w = random_simplex(k, rng);
    std::vector<CMatrix> gs;
    std::vector<double> xs;
    for (int i = 0; i < k; ++i) {
      gs.push_back(random_gaussian(n, n, rng));
      xs.push_back(box.lo == box.hi ? box.lo : uniform(rng));
    }
    try {
      return resolution_from_gaussians(std::move(w), gs, std::move(xs));
    } catch (const NumericalError&) {
      continue;
    }
  }
  throw NumericalError("random_resolution: resampling budget exhausted", 0.0);
}

UnitalPositiveMap::UnitalPositiveMap(std::vector<CMatrix> kraus, bool transpose_input)
    : kraus_(std::move(kraus)), transpose_input_(transpose_input) {
  if (kraus_.empty()) throw UsageError("unital map needs at least one Kraus operator");
  const Eigen::Index rows = kraus_.front().rows(), cols = kraus_.front().cols();
  CMatrix t = -CMatrix::Identity(cols, cols);
  for (const CMatrix& k : kraus_) {
    if (k.rows() != rows || k.cols() != cols) throw UsageError("Kraus operators must share one shape");
    t += k.adjoint() * k;
  }
  unital_residual_ = t.norm();
  if (unital_residual_ > 1e-12 * static_cast<double>(cols)) {
    throw HypothesisError("Phi unital", "||sum K_i* K_i - I|| = " + std::to_string(unital_residual_));
  }
}

HermitianMatrix UnitalPositiveMap::operator()(const HermitianMatrix& x) const {
  if (x.dim() != input_dim()) throw UsageError("unital map: input dimension mismatch");
  const CMatrix in = transpose_input_ ? CMatrix(x.matrix().transpose()) : x.matrix();
  CMatrix out = CMatrix::Zero(output_dim(), output_dim());
  for (const CMatrix& k : kraus_) out += k.adjoint() * in * k;
  return HermitianMatrix(out);
}

UnitalPositiveMap unital_map_from_gaussians(const std::vector<CMatrix>& gs, bool transpose_input) {
  if (gs.empty()) throw UsageError("unital map needs at least one generator");
  const Eigen::Index cols = gs.front().cols();
  CMatrix t = CMatrix::Zero(cols, cols);
  for (const CMatrix& g : gs) t += g.adjoint() * g;
  const HermitianMatrix th(t);
  const RVector ev = th.eigenvalues();
  if (!(ev(0) > 1e-8 * ev(ev.size() - 1))) throw NumericalError("unital map: T is numerically singular", ev(0));
  const CMatrix root = inverse_sqrt(th).matrix();
  std::vector<CMatrix> kraus;
  for (const CMatrix& g : gs) kraus.push_back(g * root);
  return UnitalPositiveMap(std::move(kraus), transpose_input);
}

UnitalPositiveMap random_unital_positive_map(int n, int m_kraus, Rng& rng, bool transpose_input) {
  require_dim(n, "random_unital_positive_map");
  if (m_kraus < 1) throw UsageError("m_kraus must be >= 1");
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    std::vector<CMatrix> gs;
    for (int i = 0; i < m_kraus; ++i) gs.push_back(random_gaussian(n, n, rng));
    try {
      return unital_map_from_gaussians(gs, transpose_input);
    } catch (const NumericalError&) {
      continue;
    }
  }
  throw NumericalError("random_unital_positive_map: resampling budget exhausted", 0.0);
}

}  // namespace opgx
