#pragma once

// One checkable predicate per inequality. Every check_* computes both sides
// as Hermitian matrices and reports gap = λ_min(RHS − LHS); gap ≥ 0 means the
// inequality holds. Hypotheses are validated first and reported through
// HypothesisError, never as a verdict.

#include "opgx/linalg.hpp"
#include "opgx/samplers.hpp"
#include "opgx/scalar_functions.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opgx {

enum class InequalityId {
  definition,
  subunit,
  jensen,
  index_superadd,
  index_chain,
  hansen_pedersen,
  contraction,
  projection,
  resolution,
  cdj,
  inverse_ratio,
  chaotic_mean,
  power_mean_monotone,
  log_euclidean_limit,
};

std::string_view to_string(InequalityId id);
std::optional<InequalityId> parse_inequality(std::string_view name);
std::span<const InequalityId> all_inequalities();

struct CheckOutcome {
  InequalityId id = InequalityId::definition;
  HermitianMatrix lhs;
  HermitianMatrix rhs;
  OrderVerdict verdict;
  /// Exploration data, not a check of a proven inequality.
  bool exploratory = false;
  double wall_time = 0.0;

  double gap() const { return verdict.gap; }
  bool holds() const { return verdict.holds; }
  bool certified_violation() const { return verdict.certified_violation(); }
};

/// f, h, p, K and tolerances shared by a family of checks, with the sample
/// scans of h computed once.
class OracleSetting {
 public:
  OracleSetting(ScalarFunction f, WeightFunction h, double p, Interval k, ToleranceConfig tol = {});

  const ScalarFunction& f() const { return f_; }
  const WeightFunction& h() const { return h_; }
  double p() const { return p_; }
  const Interval& k() const { return k_; }
  const ToleranceConfig& tol() const { return tol_; }
  const HypothesisReport& supermultiplicative_report() const { return supermult_; }
  const HypothesisReport& half_condition_report() const { return half_; }

  /// 2h(1/2).
  double two_h_half() const { return 2.0 * h_(0.5); }
  HermitianMatrix apply_f(const HermitianMatrix& a) const;

  void require_supermultiplicative() const;
  void require_half_condition() const;
  void require_f_vanishes_at_zero() const;
  void require_zero_in_k() const;
  void require_spectrum_in_k(const HermitianMatrix& a, std::string_view name) const;

 private:
  ScalarFunction f_;
  WeightFunction h_;
  double p_;
  Interval k_;
  ToleranceConfig tol_;
  HypothesisReport supermult_;
  HypothesisReport half_;
};

CheckOutcome make_outcome(InequalityId id, HermitianMatrix lhs, HermitianMatrix rhs, const ToleranceConfig& tol);

/// [Σ w_i A_i^p]^{1/p}.
HermitianMatrix weighted_power_mean(std::span<const HermitianMatrix> as, std::span<const double> weights, double p,
                                    const ToleranceConfig& tol = {});

CheckOutcome check_definition(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b,
                              double alpha);
CheckOutcome check_subunit_weights(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b,
                                   double alpha, double beta);
CheckOutcome check_jensen(const OracleSetting& s, std::span<const HermitianMatrix> as,
                          std::span<const double> alphas);

struct IndexSetInstance {
  std::vector<double> weights;
  std::vector<HermitianMatrix> matrices;

  std::size_t size() const { return weights.size(); }
  void validate() const;
  /// W_E.
  double total_weight(std::span<const int> e) const;
};

/// F(E) = h(W_E) f([W_E⁻¹ Σ_{i∈E} w_i A_i^p]^{1/p}) − Σ_{i∈E} h(w_i) f(A_i), 0-based E.
HermitianMatrix index_set_value(const OracleSetting& s, const IndexSetInstance& inst, std::span<const int> e);
CheckOutcome check_index_superadditive(const OracleSetting& s, const IndexSetInstance& inst, std::span<const int> m,
                                       std::span<const int> e);

struct IndexChainReport {
  /// F(M_l) ⪯ F(M_{l−1}) for l = k..3, then F(M_2) ⪯ 0.
  std::vector<CheckOutcome> chain;
  /// F(M_k) ⪯ pair value for every i < j.
  std::vector<CheckOutcome> pair_bounds;

  bool all_hold() const;
  const CheckOutcome& worst() const;
};

IndexChainReport check_index_chain(const OracleSetting& s, const IndexSetInstance& inst);

CheckOutcome check_hansen_pedersen(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b,
                                   const ContractionPair& pair);
CheckOutcome check_contraction_form(const OracleSetting& s, const HermitianMatrix& a, const CMatrix& v);
CheckOutcome check_projection_form(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& q);
CheckOutcome check_resolution_form(const OracleSetting& s, const ResolutionOfIdentity& res);
CheckOutcome check_cdj(const OracleSetting& s, const HermitianMatrix& a, const UnitalPositiveMap& phi);
/// A⁻¹f(A) ⪯ 2h(1/2) B⁻¹f(B), both sides via t ↦ f(t)/t.
CheckOutcome check_inverse_ratio(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b);

/// ((A^p + B^p)/2)^{1/p}.
HermitianMatrix power_mean(const HermitianMatrix& a, const HermitianMatrix& b, double p,
                           const ToleranceConfig& tol = {});
/// exp((log A + log B)/2).
HermitianMatrix log_euclidean_mean(const HermitianMatrix& a, const HermitianMatrix& b,
                                   const ToleranceConfig& tol = {});

CheckOutcome check_power_mean_monotone(const HermitianMatrix& a, const HermitianMatrix& b, double p1, double p2,
                                       const ToleranceConfig& tol = {});

struct LimitReport {
  std::vector<double> ps;
  std::vector<double> residuals;
  bool strictly_decreasing = true;
  double final_residual() const { return residuals.back(); }
};

/// Relative Frobenius distance between the power mean at each p and the
/// log-Euclidean mean.
LimitReport check_log_euclidean_limit(const HermitianMatrix& a, const HermitianMatrix& b, std::span<const double> ps,
                                      const ToleranceConfig& tol = {});

CheckOutcome check_chaotic_mean(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b);

}  // namespace opgx
