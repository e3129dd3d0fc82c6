#pragma once

// Operand bundles for every inequality: random drawing, realization of the
// structured operands from their raw Gaussian inputs, evaluation through the
// matching oracle, and the witness JSON format used for replay.

#include "opgx/oracles.hpp"
#include "opgx/samplers.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace opgx {

inline constexpr int kWitnessSchemaVersion = 1;

/// Extra knobs some inequalities need. Unused fields are ignored.
struct TrialParams {
  int k = 3;                    // matrices in jensen / index sets / resolution terms
  int rank = -1;                // projection rank; -1 draws uniformly from 0..n
  int m_kraus = 3;
  double p1 = 1.0;
  double p2 = 2.0;
  std::optional<double> alpha;  // fixed α for definition
  bool isometry = false;        // contraction: draw exact unitaries
  bool transpose_twist = false; // cdj: Φ(X) = Σ K_i† Xᵀ K_i
  std::vector<double> limit_ps{1e-2, 1e-3, 1e-4};
  double limit_residual = 1e-3;
  double cap_width = 10.0;

  /// Reads recognised keys, rejecting unknown ones.
  static TrialParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Sets one numeric knob by name (CLI and C API).
  void set(const std::string& name, double value);
};

struct Problem {
  InequalityId id;
  std::string f_spec;
  std::string h_spec;
  OracleSetting setting;
  TrialParams params;

  const Interval& k() const { return setting.k(); }
  const ToleranceConfig& tol() const { return setting.tol(); }
  double p() const { return setting.p(); }
};

/// Default K: [0.1, 10] where strict positivity is needed, [0, 10] otherwise.
Interval default_interval(InequalityId id);

Problem make_problem(InequalityId id, const std::string& f_spec, const std::string& h_spec, double p,
                     const Interval& k, const ToleranceConfig& tol = {}, TrialParams params = {});

/// Realized inputs of one inequality instance.
struct Operands {
  int n = 0;
  std::vector<HermitianMatrix> mats;
  std::vector<double> weights;
  std::vector<int> split;  // index_superadd: 0 → M, 1 → E
  std::optional<ContractionPair> pair;
  std::optional<CMatrix> contraction;
  std::optional<HermitianMatrix> projection;
  std::optional<ResolutionOfIdentity> resolution;
  std::optional<UnitalPositiveMap> map;
};

/// Free parameters an instance is built from; the falsifier perturbs these.
struct Draft {
  int n = 0;
  std::vector<HermitianMatrix> mats;  // spectra confined to `boxes`
  std::vector<Interval> boxes;
  std::vector<double> weights;
  std::vector<double> points;         // resolution x_i
  std::vector<CMatrix> generators;
  std::vector<int> split;
  double shrink = 1.0;                // contraction: g / (‖g‖·shrink)
  int rank = 0;
  Operands operands;
};

Draft draw(const Problem& problem, int n, Rng& rng);
/// Rebuilds `draft.operands`; throws NumericalError when the raw inputs are degenerate.
void realize(const Problem& problem, Draft& draft);
/// Projects weights back onto the constraint set of the inequality.
void normalize_weights(const Problem& problem, std::vector<double>& weights);

CheckOutcome evaluate(const Problem& problem, const Operands& operands);

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

struct Witness {
  Problem problem;
  Operands operands;
  SeedSpec seed;
  std::optional<double> recorded_gap;
};

nlohmann::json witness_to_json(const Problem& problem, const Operands& operands, const SeedSpec& seed,
                               const CheckOutcome& outcome);
Witness witness_from_json(const nlohmann::json& j);

}  // namespace opgx
