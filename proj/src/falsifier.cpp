#include "opgx/falsifier.hpp"

#include "opgx/errors.hpp"
#include "opgx/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opgx {

namespace {

constexpr int kFailuresBeforeDecay = 10;
constexpr double kMinScale = 1e-9;

double objective(const CheckOutcome& c) {
  const double band = c.verdict.band > 0.0 ? c.verdict.band : 1.0;
  return -c.gap() / band;
}

HermitianMatrix project_spectrum(const HermitianMatrix& m, const Interval& box) {
  return map_spectrum(m, [&](double x) { return std::clamp(x, box.lo, box.hi); });
}

// One local move on a copy of the draft; components are picked uniformly.
Draft perturb(const Problem& problem, const Draft& base, double scale, Rng& rng) {
  Draft d = base;
  std::normal_distribution<double> normal(0.0, 1.0);
  enum Part { mat, weights, points, generator, shrink, split };
  std::vector<std::pair<Part, std::size_t>> parts;
  for (std::size_t i = 0; i < d.mats.size(); ++i) parts.emplace_back(mat, i);
  if (!d.weights.empty() && !(problem.id == InequalityId::definition && problem.params.alpha)) {
    parts.emplace_back(weights, 0);
  }
  if (!d.points.empty()) parts.emplace_back(points, 0);
  for (std::size_t i = 0; i < d.generators.size(); ++i) parts.emplace_back(generator, i);
  if (problem.id == InequalityId::contraction && !problem.params.isometry) parts.emplace_back(shrink, 0);
  if (d.split.size() > 2) parts.emplace_back(split, 0);
  if (parts.empty()) return d;

  const auto [part, idx] = parts[std::uniform_int_distribution<std::size_t>(0, parts.size() - 1)(rng)];
  switch (part) {
    case mat: {
      const Interval& box = d.boxes[idx];
      const double width = box.hi > box.lo ? box.hi - box.lo : 0.0;
      if (width == 0.0) break;
      const CMatrix g = random_gaussian(d.n, d.n, rng);
      const CMatrix h = 0.5 * (g + g.adjoint());
      const CMatrix bumped = d.mats[idx].matrix() + (scale * width / h.norm()) * h;
      d.mats[idx] = project_spectrum(HermitianMatrix(bumped), box);
      break;
    }
    case weights: {
      const double step = scale / static_cast<double>(d.weights.size());
      for (double& w : d.weights) w += step * normal(rng);
      normalize_weights(problem, d.weights);
      break;
    }
    case points: {
      const Interval box = problem.k().capped(problem.params.cap_width);
      for (double& x : d.points) x = std::clamp(x + scale * (box.hi - box.lo) * normal(rng), box.lo, box.hi);
      break;
    }
    case generator: {
      CMatrix& g = d.generators[idx];
      const double unit = g.norm() / std::sqrt(static_cast<double>(g.size()));
      g += (scale * unit) * random_gaussian(static_cast<int>(g.rows()), static_cast<int>(g.cols()), rng);
      break;
    }
    case shrink:
      d.shrink = std::clamp(d.shrink + scale * normal(rng), 1.0, 4.0);
      break;
    case split: {
      const std::size_t i = std::uniform_int_distribution<std::size_t>(0, d.split.size() - 1)(rng);
      d.split[i] ^= 1;
      const auto zeros = std::count(d.split.begin(), d.split.end(), 0);
      if (zeros == 0 || zeros == static_cast<long>(d.split.size())) d.split[i] ^= 1;
      break;
    }
  }
  return d;
}

struct RestartResult {
  std::optional<ViolationWitness> best;
  double best_objective = -std::numeric_limits<double>::infinity();
  std::uint64_t evaluations = 0;
  std::uint64_t rejected = 0;
  std::vector<double> trace;
};

RestartResult run_restart(const Problem& problem, const SearchConfig& cfg, std::size_t restart) {
  RestartResult out;
  const SeedSpec seed{cfg.master_seed, restart};
  Rng rng = seed.engine();
  const int n = cfg.dims[restart % cfg.dims.size()];

  Draft current = draw(problem, n, rng);
  CheckOutcome current_outcome;
  double current_obj = -std::numeric_limits<double>::infinity();
  ++out.evaluations;
  try {
    current_outcome = evaluate(problem, current.operands);
    current_obj = objective(current_outcome);
  } catch (const Error&) {
    ++out.rejected;
  }

  double scale = cfg.perturb_scale;
  int failures = 0;
  const int steps = cfg.steps_per_restart();
  for (int step = 0; step < steps; ++step) {
    ++out.evaluations;
    bool accepted = false;
    try {
      Draft cand = perturb(problem, current, scale, rng);
      realize(problem, cand);
      CheckOutcome c = evaluate(problem, cand.operands);
      const double obj = objective(c);
      if (obj > current_obj) {
        current = std::move(cand);
        current_outcome = std::move(c);
        current_obj = obj;
        accepted = true;
        out.trace.push_back(current_obj);
      }
    } catch (const Error&) {
      ++out.rejected;
    }
    if (accepted) {
      failures = 0;
    } else if (++failures >= kFailuresBeforeDecay) {
      scale = std::max(scale / 2.0, kMinScale);
      failures = 0;
    }
  }

  if (std::isfinite(current_obj)) {
    out.best_objective = current_obj;
    ViolationWitness w;
    w.operands = current.operands;
    w.seed = seed;
    w.outcome = current_outcome;
    w.violation = -current_outcome.gap();
    w.certified = current_outcome.certified_violation();
    out.best = std::move(w);
  }
  return out;
}

}  // namespace

void SearchConfig::validate() const {
  if (restarts < 1) throw UsageError("restarts must be >= 1");
  if (dims.empty()) throw UsageError("search needs at least one dimension");
  for (int n : dims)
    if (n < 1) throw UsageError("search dimensions must be >= 1");
  if (!(perturb_scale > 0.0)) throw UsageError("perturb_scale must be positive");
  const std::uint64_t steps = perturb_steps < 0 ? budget / static_cast<std::uint64_t>(restarts) : static_cast<std::uint64_t>(perturb_steps) + 1;
  if (steps < 1 || static_cast<std::uint64_t>(restarts) * steps > budget) {
    throw UsageError("budget " + std::to_string(budget) + " cannot cover " + std::to_string(restarts) +
                     " restarts of " + std::to_string(steps) + " evaluations");
  }
}

int SearchConfig::steps_per_restart() const {
  if (perturb_steps >= 0) return perturb_steps;
  return static_cast<int>(budget / static_cast<std::uint64_t>(restarts)) - 1;
}

void require_searchable(const Problem& problem) {
  const OracleSetting& s = problem.setting;
  try {
    switch (problem.id) {
      case InequalityId::power_mean_monotone:
        if (!(problem.params.p1 >= 1.0 && problem.params.p2 > problem.params.p1)) {
          throw HypothesisError("1 <= p1 < p2", "p1 = " + std::to_string(problem.params.p1) +
                                                    ", p2 = " + std::to_string(problem.params.p2));
        }
        return;
      case InequalityId::log_euclidean_limit:
      case InequalityId::chaotic_mean:
        return;
      default:
        break;
    }
    s.require_supermultiplicative();
    switch (problem.id) {
      case InequalityId::subunit:
        s.require_f_vanishes_at_zero();
        s.require_zero_in_k();
        break;
      case InequalityId::contraction:
      case InequalityId::projection:
        s.require_half_condition();
        s.require_f_vanishes_at_zero();
        s.require_zero_in_k();
        break;
      case InequalityId::resolution:
      case InequalityId::cdj:
        s.require_half_condition();
        s.require_f_vanishes_at_zero();
        break;
      case InequalityId::inverse_ratio:
        if (s.p() != 1.0) throw HypothesisError("p = 1", "got " + std::to_string(s.p()));
        s.require_half_condition();
        s.require_f_vanishes_at_zero();
        break;
      default:
        break;
    }
  } catch (const HypothesisError& e) {
    throw UsageError(std::string("infeasible hypotheses for ") + std::string(to_string(problem.id)) + ": " + e.what());
  }
}

FalsifyResult falsify(const Problem& problem, const SearchConfig& cfg) {
  cfg.validate();
  require_searchable(problem);
  std::vector<RestartResult> results(static_cast<std::size_t>(cfg.restarts));
  parallel_for(results.size(), cfg.threads, [&](std::size_t r) { results[r] = run_restart(problem, cfg, r); });

  FalsifyResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (RestartResult& r : results) {
    out.evaluations += r.evaluations;
    out.rejected += r.rejected;
    out.traces.push_back(std::move(r.trace));
    // Strict comparison keeps the lowest restart index on ties.
    if (r.best && r.best_objective > best) {
      best = r.best_objective;
      out.best = std::move(r.best);
    }
  }
  if (out.best && out.best->certified && out.best->violation > 0.0) out.witness = out.best;
  return out;
}

ClassifyResult classify_empirical(const Problem& problem, const SearchConfig& cfg) {
  ClassifyResult out;
  out.search = falsify(problem, cfg);
  out.violated = out.search.witness.has_value();
  const auto s = problem.setting.f().power_exponent();
  if (problem.id == InequalityId::definition && s &&
      problem.setting.h().family() == WeightFunction::Family::identity) {
    out.prediction = classify_power_function(*s, problem.p());
    out.agreement = out.prediction->member != out.violated;
  }
  return out;
}

}  // namespace opgx
