#pragma once

// Closed-form families for the candidate function f on K and the weight
// function h on J, plus the hypothesis scans the theorems gate on.

#include "opgx/linalg.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace opgx {

/// Non-negative continuous f on an interval K.
class ScalarFunction {
 public:
  struct Power {
    double s;
  };
  struct Polynomial {
    std::vector<double> coeffs;  // low-to-high
  };
  struct Term {
    double weight;
    std::shared_ptr<const ScalarFunction> fn;
  };
  struct AffineCombo {
    std::vector<Term> terms;
  };
  using Family = std::variant<Power, Polynomial, AffineCombo>;

  static ScalarFunction power(double s, Interval domain);
  static ScalarFunction polynomial(std::vector<double> coeffs, Interval domain);
  static ScalarFunction affine_combo(std::vector<Term> terms);

  /// Evaluates at x; throws a domain error outside the closure of K.
  double operator()(double x) const;
  const Interval& domain() const { return domain_; }
  const Family& family() const { return family_; }
  /// f(0) = 0, decided from the closed form.
  bool vanishes_at_zero() const;
  /// The exponent when f is a pure power t^s.
  std::optional<double> power_exponent() const;
  /// Canonical text form, parseable by parse_function.
  std::string spec() const;

 private:
  ScalarFunction(Family family, Interval domain);
  double eval_unchecked(double x) const;
  void validate_nonnegative() const;

  Family family_;
  Interval domain_;
};

enum class Combine { sum, scale };

/// sum(f, g) or scale(λ, f). Domains must match and λ > 0.
ScalarFunction combine(Combine op, const ScalarFunction& f, const ScalarFunction* g = nullptr,
                       double lambda = 1.0);

/// Parses `power:s=1.5`, `poly:1,0,2`, `sum(a,b,...)`, `scale:3(a)`.
ScalarFunction parse_function(std::string_view text, const Interval& domain);

class WeightFunction {
 public:
  enum class Family { identity, power, constant_one, reciprocal, cubic, half_cubic };

  explicit WeightFunction(Family family, double s = 1.0);
  WeightFunction(Family family, double s, Interval domain);

  double operator()(double x) const;
  Family family() const { return family_; }
  double exponent() const { return s_; }
  const Interval& domain() const { return domain_; }
  std::string spec() const;

  /// (0,1] for the reciprocal, [0,1] otherwise.
  static Interval default_domain(Family family);

 private:
  double eval_unchecked(double x) const;

  Family family_;
  double s_;
  Interval domain_;
};

/// Parses `identity`, `power:s=1.3`, `one`, `recip`, `cubic`, `half_cubic`.
WeightFunction parse_weight(std::string_view text);
WeightFunction parse_weight(std::string_view text, const Interval& domain);

struct HypothesisReport {
  std::string property;
  double min_discrepancy = 0.0;
  std::vector<double> arg_min;
  bool holds = true;
  std::int64_t samples_used = 0;
  std::int64_t samples_skipped = 0;
};

inline constexpr double kHypothesisSlack = 1e-12;

/// h(xy) − h(x)h(y).
double supermultiplicative_discrepancy(const WeightFunction& h, double x, double y);

/// Minimum of h(xy) − h(x)h(y) over an n_grid × n_grid grid of J plus n_random
/// uniform pairs. Pairs whose product leaves J are skipped and counted.
HypothesisReport check_supermultiplicative(const WeightFunction& h, const Interval& j, int n_grid,
                                           int n_random, std::uint64_t seed);

/// Minimum of h(α)/α − 2h(1/2) over α = k/(n_grid+1), k = 1..n_grid.
HypothesisReport check_half_condition(const WeightFunction& h, int n_grid);

struct PowerClassification {
  bool member = false;
  double ratio = 0.0;  // s/p
  bool operator_monotone = false;
  bool operator_convex = false;
  std::string reason;
};

/// t^s in opgx(p, id, ℝ⁺) exactly when s/p ∈ [1, 2].
PowerClassification classify_power_function(double s, double p);

}  // namespace opgx
