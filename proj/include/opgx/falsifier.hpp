#pragma once

// Randomized counterexample search. Each restart draws fresh operands and
// hill-climbs on the normalized violation λ_max(LHS − RHS) / band.

#include "opgx/trial.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace opgx {

struct SearchConfig {
  std::uint64_t budget = 20000;  // oracle evaluations, initial draws included
  int restarts = 40;
  int perturb_steps = -1;        // -1: budget / restarts − 1
  double perturb_scale = 0.1;
  std::vector<int> dims{2, 3};
  std::uint64_t master_seed = 0;
  unsigned threads = 1;

  void validate() const;
  int steps_per_restart() const;
};

struct ViolationWitness {
  Operands operands;
  SeedSpec seed;  // (master_seed, restart index)
  CheckOutcome outcome;
  double violation = 0.0;  // λ_max(LHS − RHS) = −gap
  bool certified = false;  // gap < −10·band
};

struct FalsifyResult {
  /// Set iff some evaluation exceeded the hysteresis band.
  std::optional<ViolationWitness> witness;
  /// Best instance seen, certified or not.
  std::optional<ViolationWitness> best;
  std::uint64_t evaluations = 0;
  std::uint64_t rejected = 0;  // perturbations that failed numerically or left the hypothesis space
  /// Best normalized violation after each accepted step, per restart.
  std::vector<std::vector<double>> traces;
};

/// Throws UsageError when the fixed (f, h, p, K) cannot satisfy the
/// inequality's hypotheses, before any search.
void require_searchable(const Problem& problem);

FalsifyResult falsify(const Problem& problem, const SearchConfig& cfg);

struct ClassifyResult {
  FalsifyResult search;
  bool violated = false;
  std::optional<PowerClassification> prediction;  // f = t^s, h = identity, definition target
  std::optional<bool> agreement;
};

ClassifyResult classify_empirical(const Problem& problem, const SearchConfig& cfg);

}  // namespace opgx
