#pragma once

// Dense Hermitian linear algebra: spectral decomposition, functional
// calculus, powers, exp/log and the tolerance-aware Loewner comparison.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>

namespace opgx {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

class ScalarFunction;

struct ToleranceConfig {
  double atol = 1e-9;
  double rtol = 1e-8;

  /// Throws UsageError unless both are finite and positive.
  void validate() const;
  /// Loewner band for a pair whose spectral norms sum to `scale`.
  double band(double scale) const { return atol + rtol * scale; }
};

/// Subset of the non-negative half line; `hi` may be +infinity.
struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool closed_lo = true;
  bool closed_hi = true;

  static Interval closed(double lo, double hi);
  static Interval left_open(double lo, double hi);

  void validate() const;
  bool contains(double x) const;
  /// Membership after widening each finite endpoint by `slack`.
  bool contains_widened(double x, double slack) const;
  bool bounded() const { return std::isfinite(hi); }
  /// Bounded version used for sampling: unbounded `hi` becomes lo + cap_width.
  Interval capped(double cap_width = 10.0) const;
  std::string to_string() const;
};

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  /// Symmetrizes (A + A†)/2; fails if the correction exceeds 1e-12·‖A‖_F.
  explicit HermitianMatrix(const CMatrix& m);

  static HermitianMatrix identity(int n);
  static HermitianMatrix zero(int n);
  static HermitianMatrix diagonal(std::span<const double> values);
  /// U diag(values) U†.
  static HermitianMatrix from_spectrum(const CMatrix& u, std::span<const double> values);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  /// Frobenius norm of the anti-Hermitian part removed at construction.
  double correction() const { return correction_; }

  double frobenius_norm() const { return m_.norm(); }
  double spectral_norm() const;
  RVector eigenvalues() const;
  double min_eigenvalue() const;
  double max_eigenvalue() const;

  /// V† A V for any conforming V (rows of V = dim).
  HermitianMatrix congruence(const CMatrix& v) const;

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) { return a * s; }

 private:
  struct Trusted {};
  HermitianMatrix(CMatrix m, Trusted) : m_(std::move(m)) {}

  CMatrix m_;
  double correction_ = 0.0;
};

struct SpectralDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, unitary

  HermitianMatrix reconstruct() const;
};

SpectralDecomposition spectral_decompose(const HermitianMatrix& a);

/// U diag(fn(λ)) U† with no domain handling; callers validate the spectrum.
HermitianMatrix map_spectrum(const HermitianMatrix& a, const std::function<double(double)>& fn);

/// f(A) by functional calculus. Eigenvalues within atol + 1e-10·‖A‖₂ of K are
/// clamped onto K; farther ones raise a spectrum error naming the eigenvalue.
HermitianMatrix apply_scalar_function(const ScalarFunction& f, const HermitianMatrix& a,
                                      const Interval& k, const ToleranceConfig& tol = {});

/// A^p for PSD A. Eigenvalues in [-1e-10·‖A‖₂, 0) are clamped to zero.
HermitianMatrix matrix_power(const HermitianMatrix& a, double p, const ToleranceConfig& tol = {});
HermitianMatrix matrix_log(const HermitianMatrix& a, const ToleranceConfig& tol = {});
HermitianMatrix matrix_exp(const HermitianMatrix& a);

struct OrderVerdict {
  double gap = 0.0;    // λ_min(Y − X)
  double scale = 0.0;  // ‖X‖₂ + ‖Y‖₂
  double band = 0.0;   // atol + rtol·scale
  bool holds = false;  // gap ≥ −band

  /// A violation claim needs gap < −10·band.
  bool certified_violation() const { return gap < -10.0 * band; }
};

/// Verdict for X ⪯ Y.
OrderVerdict loewner_compare(const HermitianMatrix& x, const HermitianMatrix& y,
                             const ToleranceConfig& tol = {});

struct SpectrumCheck {
  bool inside = true;
  std::optional<double> worst_offender;
};

SpectrumCheck spectrum_in_interval(const HermitianMatrix& a, const Interval& k,
                                   const ToleranceConfig& tol = {});

double spectral_norm(const CMatrix& m);
double clamp_tolerance(const HermitianMatrix& a);

}  // namespace opgx
