#include "opgx/linalg.hpp"

#include "opgx/errors.hpp"
#include "opgx/scalar_functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opgx {

namespace {

constexpr double kHermitianRtol = 1e-12;
constexpr double kClampRtol = 1e-10;

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::domain: return "domain";
    case ErrorKind::spectrum: return "spectrum";
    case ErrorKind::not_psd: return "not_psd";
    case ErrorKind::singular: return "singular";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

void ToleranceConfig::validate() const {
  if (!(std::isfinite(atol) && atol > 0.0) || !(std::isfinite(rtol) && rtol > 0.0)) {
    throw UsageError("tolerances must be finite and positive (atol=" + fmt_double(atol) +
                     ", rtol=" + fmt_double(rtol) + ")");
  }
}

Interval Interval::closed(double lo, double hi) {
  Interval k{lo, hi, true, true};
  k.validate();
  return k;
}

Interval Interval::left_open(double lo, double hi) {
  Interval k{lo, hi, false, true};
  k.validate();
  return k;
}

void Interval::validate() const {
  // A degenerate closed interval [a, a] is allowed; samplers use it.
  if (!(lo >= 0.0) || std::isnan(hi) || hi < lo || (hi == lo && !(closed_lo && closed_hi))) {
    throw UsageError("invalid interval " + to_string() + " (need 0 <= lo <= hi)");
  }
}

bool Interval::contains(double x) const {
  const bool above = closed_lo ? x >= lo : x > lo;
  const bool below = closed_hi ? x <= hi : x < hi;
  return above && below;
}

bool Interval::contains_widened(double x, double slack) const {
  if (x < lo - slack) return false;
  if (std::isfinite(hi) && x > hi + slack) return false;
  return true;
}

Interval Interval::capped(double cap_width) const {
  if (bounded()) return *this;
  return Interval{lo, lo + cap_width, closed_lo, true};
}

std::string Interval::to_string() const {
  std::ostringstream os;
  os << (closed_lo ? '[' : '(') << lo << ',' << hi << (closed_hi ? ']' : ')');
  return os.str();
}

HermitianMatrix::HermitianMatrix(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw UsageError("Hermitian matrix must be square with dim >= 1, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw NumericalError(ErrorKind::numerical, "matrix has non-finite entries");
  CMatrix sym = 0.5 * (m + m.adjoint());
  correction_ = (m - sym).norm();
  const double norm = m.norm();
  if (correction_ > kHermitianRtol * norm) {
    throw UsageError("matrix is not Hermitian: anti-Hermitian part " + fmt_double(correction_) +
                     " exceeds 1e-12 * ||A||_F = " + fmt_double(kHermitianRtol * norm));
  }
  // Exact symmetry of the stored entries, including real diagonal.
  for (Eigen::Index i = 0; i < sym.rows(); ++i) {
    sym(i, i) = Complex(sym(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < sym.cols(); ++j) sym(j, i) = std::conj(sym(i, j));
  }
  m_ = std::move(sym);
}

HermitianMatrix HermitianMatrix::identity(int n) { return HermitianMatrix(CMatrix::Identity(n, n)); }

HermitianMatrix HermitianMatrix::zero(int n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                            static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::from_spectrum(const CMatrix& u, std::span<const double> values) {
  if (u.rows() != u.cols() || static_cast<std::size_t>(u.cols()) != values.size()) {
    throw UsageError("from_spectrum: eigenvector/eigenvalue size mismatch");
  }
  RVector lam(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) lam(i) = values[i];
  return HermitianMatrix(CMatrix(u * lam.cast<Complex>().asDiagonal() * u.adjoint()));
}

double HermitianMatrix::spectral_norm() const {
  const RVector ev = eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

RVector HermitianMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigenvalue solver did not converge", m_.norm());
  }
  return es.eigenvalues();
}

double HermitianMatrix::min_eigenvalue() const { return eigenvalues()(0); }

double HermitianMatrix::max_eigenvalue() const {
  const RVector ev = eigenvalues();
  return ev(ev.size() - 1);
}

HermitianMatrix HermitianMatrix::congruence(const CMatrix& v) const {
  if (v.rows() != m_.rows()) throw UsageError("congruence: dimension mismatch");
  return HermitianMatrix(CMatrix(v.adjoint() * m_ * v));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw UsageError("matrix sum: dimension mismatch");
  return HermitianMatrix(CMatrix(m_ + o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (o.dim() != dim()) throw UsageError("matrix difference: dimension mismatch");
  return HermitianMatrix(CMatrix(m_ - o.m_), Trusted{});
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(CMatrix(m_ * s), Trusted{});
}

HermitianMatrix SpectralDecomposition::reconstruct() const {
  return HermitianMatrix(
      CMatrix(eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint()));
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  if (es.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigen-solver did not converge", a.frobenius_norm());
  }
  return SpectralDecomposition{es.eigenvalues(), es.eigenvectors()};
}

HermitianMatrix map_spectrum(const HermitianMatrix& a, const std::function<double(double)>& fn) {
  SpectralDecomposition sd = spectral_decompose(a);
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) sd.eigenvalues(i) = fn(sd.eigenvalues(i));
  if (!sd.eigenvalues.allFinite()) {
    throw NumericalError(ErrorKind::numerical, "functional calculus produced a non-finite eigenvalue");
  }
  return sd.reconstruct();
}

double clamp_tolerance(const HermitianMatrix& a) { return kClampRtol * a.spectral_norm(); }

HermitianMatrix apply_scalar_function(const ScalarFunction& f, const HermitianMatrix& a,
                                      const Interval& k, const ToleranceConfig& tol) {
  SpectralDecomposition sd = spectral_decompose(a);
  const RVector& ev = sd.eigenvalues;
  const double slack =
      tol.atol + kClampRtol * std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double x = ev(i);
    if (!k.contains_widened(x, slack)) {
      throw NumericalError(ErrorKind::spectrum, "eigenvalue " + fmt_double(x) + " lies outside " +
                                                    k.to_string() + " beyond clamping tolerance");
    }
    x = std::clamp(x, k.lo, k.hi);
    sd.eigenvalues(i) = f(x);
  }
  return sd.reconstruct();
}

HermitianMatrix matrix_power(const HermitianMatrix& a, double p, const ToleranceConfig& tol) {
  if (p == 0.0 || !std::isfinite(p)) throw UsageError("matrix_power: exponent must be finite and non-zero");
  SpectralDecomposition sd = spectral_decompose(a);
  RVector& ev = sd.eigenvalues;
  const double clamp = kClampRtol * std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  if (ev(0) < -clamp) {
    throw NumericalError(ErrorKind::not_psd,
                         "matrix_power: matrix is not PSD (lambda_min = " + fmt_double(ev(0)) + ")");
  }
  if (p < 0.0 && ev(0) <= tol.atol) {
    throw NumericalError(ErrorKind::singular, "matrix_power: negative exponent of a singular matrix "
                                              "(lambda_min = " + fmt_double(ev(0)) + ")");
  }
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) < 0.0 ? 0.0 : std::pow(ev(i), p);
  return sd.reconstruct();
}

HermitianMatrix matrix_log(const HermitianMatrix& a, const ToleranceConfig& tol) {
  SpectralDecomposition sd = spectral_decompose(a);
  if (sd.eigenvalues(0) <= tol.atol) {
    throw NumericalError(ErrorKind::singular, "matrix_log: matrix is not strictly positive definite "
                                              "(lambda_min = " + fmt_double(sd.eigenvalues(0)) + ")");
  }
  sd.eigenvalues = sd.eigenvalues.array().log();
  return sd.reconstruct();
}

HermitianMatrix matrix_exp(const HermitianMatrix& a) {
  SpectralDecomposition sd = spectral_decompose(a);
  sd.eigenvalues = sd.eigenvalues.array().exp();
  if (!sd.eigenvalues.allFinite()) throw NumericalError(ErrorKind::numerical, "matrix_exp overflow");
  return sd.reconstruct();
}

OrderVerdict loewner_compare(const HermitianMatrix& x, const HermitianMatrix& y,
                             const ToleranceConfig& tol) {
  if (x.dim() != y.dim()) {
    throw UsageError("loewner_compare: dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                     std::to_string(y.dim()) + ")");
  }
  OrderVerdict v;
  v.gap = (y - x).min_eigenvalue();
  v.scale = x.spectral_norm() + y.spectral_norm();
  v.band = tol.band(v.scale);
  v.holds = v.gap >= -v.band;
  return v;
}

SpectrumCheck spectrum_in_interval(const HermitianMatrix& a, const Interval& k, const ToleranceConfig& tol) {
  SpectrumCheck out;
  double worst_excess = 0.0;
  for (double x : a.eigenvalues()) {
    double excess = 0.0;
    if (x < k.lo) excess = k.lo - x;
    if (std::isfinite(k.hi) && x > k.hi) excess = x - k.hi;
    if (excess > tol.atol && excess > worst_excess) {
      worst_excess = excess;
      out.inside = false;
      out.worst_offender = x;
    }
  }
  return out;
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace opgx
