#include "opgx/trial.hpp"

#include "opgx/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace opgx {

using nlohmann::json;

namespace {

constexpr double kWeightFloor = 1e-6;

double uniform_open(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  double x = u(rng);
  while (x <= lo) x = u(rng);
  return x;
}

std::vector<HermitianMatrix> draw_mats(int count, int n, const Interval& box, Rng& rng) {
  std::vector<HermitianMatrix> out;
  for (int i = 0; i < count; ++i) out.push_back(random_psd_with_spectrum(n, box, rng));
  return out;
}

const HermitianMatrix& mat(const Operands& ops, std::size_t i) {
  if (ops.mats.size() <= i) throw UsageError("operand bundle is missing matrix #" + std::to_string(i + 1));
  return ops.mats[i];
}

double weight(const Operands& ops, std::size_t i) {
  if (ops.weights.size() <= i) throw UsageError("operand bundle is missing weight #" + std::to_string(i + 1));
  return ops.weights[i];
}

template <class T>
const T& need(const std::optional<T>& x, const char* what) {
  if (!x) throw UsageError(std::string("operand bundle is missing ") + what);
  return *x;
}

json interval_to_json(const Interval& k) {
  json j{{"lo", k.lo}, {"closed_lo", k.closed_lo}, {"closed_hi", k.closed_hi}};
  j["hi"] = std::isfinite(k.hi) ? json(k.hi) : json("inf");
  return j;
}

Interval interval_from_json(const json& j) {
  Interval k;
  k.lo = j.at("lo").get<double>();
  k.hi = j.at("hi").is_string() ? std::numeric_limits<double>::infinity() : j.at("hi").get<double>();
  k.closed_lo = j.value("closed_lo", true);
  k.closed_hi = j.value("closed_hi", true);
  k.validate();
  return k;
}

}  // namespace

TrialParams TrialParams::from_json(const json& j) {
  TrialParams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw UsageError("params must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "alpha") {
      p.alpha = value.get<double>();
    } else if (key == "isometry") {
      p.isometry = value.get<bool>();
    } else if (key == "transpose_twist") {
      p.transpose_twist = value.get<bool>();
    } else if (key == "limit_ps") {
      p.limit_ps = value.get<std::vector<double>>();
    } else if (value.is_number()) {
      p.set(key, value.get<double>());
    } else {
      throw UsageError("param '" + key + "' has the wrong type");
    }
  }
  return p;
}

json TrialParams::to_json() const {
  json j{{"k", k},   {"rank", rank},         {"m_kraus", m_kraus},         {"p1", p1},
         {"p2", p2}, {"isometry", isometry}, {"transpose_twist", transpose_twist},
         {"limit_ps", limit_ps}, {"limit_residual", limit_residual}, {"cap_width", cap_width}};
  if (alpha) j["alpha"] = *alpha;
  return j;
}

void TrialParams::set(const std::string& name, double value) {
  auto as_int = [&](int lo) {
    if (value != std::floor(value) || value < lo) throw UsageError("param '" + name + "' must be an integer >= " + std::to_string(lo));
    return static_cast<int>(value);
  };
  if (name == "k") k = as_int(2);
  else if (name == "rank") rank = as_int(-1);
  else if (name == "m_kraus") m_kraus = as_int(1);
  else if (name == "p1") p1 = value;
  else if (name == "p2") p2 = value;
  else if (name == "alpha") alpha = value;
  else if (name == "isometry") isometry = value != 0.0;
  else if (name == "transpose_twist") transpose_twist = value != 0.0;
  else if (name == "limit_residual") limit_residual = value;
  else if (name == "p_small") limit_ps = {std::min(1e-2, value * 100), std::min(1e-2, value * 10), value};
  else if (name == "cap_width") {
    if (!(value > 0.0)) throw UsageError("cap_width must be positive");
    cap_width = value;
  } else {
    throw UsageError("unknown param '" + name + "'");
  }
}

Interval default_interval(InequalityId id) {
  switch (id) {
    case InequalityId::inverse_ratio:
    case InequalityId::chaotic_mean:
    case InequalityId::log_euclidean_limit:
      return Interval::closed(0.1, 10.0);
    default:
      return Interval::closed(0.0, 10.0);
  }
}

Problem make_problem(InequalityId id, const std::string& f_spec, const std::string& h_spec, double p,
                     const Interval& k, const ToleranceConfig& tol, TrialParams params) {
  ScalarFunction f = parse_function(f_spec, k);
  WeightFunction h = parse_weight(h_spec);
  return Problem{id, f.spec(), h.spec(), OracleSetting(std::move(f), std::move(h), p, k, tol), std::move(params)};
}

void normalize_weights(const Problem& problem, std::vector<double>& w) {
  for (double& x : w) x = std::max(std::abs(x), kWeightFloor);
  switch (problem.id) {
    case InequalityId::definition:
      for (double& x : w) x = std::clamp(x, kWeightFloor, 1.0 - kWeightFloor);
      break;
    case InequalityId::subunit:
    case InequalityId::index_superadd:
    case InequalityId::index_chain: {
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      if (total > 1.0)
        for (double& x : w) x /= total;
      break;
    }
    case InequalityId::jensen:
    case InequalityId::resolution: {
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      for (double& x : w) x /= total;
      break;
    }
    default:
      break;
  }
}

Draft draw(const Problem& problem, int n, Rng& rng) {
  if (n < 1) throw UsageError("dimension must be >= 1");
  const TrialParams& prm = problem.params;
  const Interval box = problem.k().capped(prm.cap_width);
  Draft d;
  d.n = n;
  auto add_mats = [&](int count, const Interval& b) {
    for (HermitianMatrix& m : draw_mats(count, n, b, rng)) {
      d.mats.push_back(std::move(m));
      d.boxes.push_back(b);
    }
  };
  switch (problem.id) {
    case InequalityId::definition:
      add_mats(2, box);
      d.weights = {prm.alpha.value_or(uniform_open(rng, 0.0, 1.0))};
      break;
    case InequalityId::subunit: {
      add_mats(2, box);
      const double total = uniform_open(rng, 0.0, 1.0);
      const double share = uniform_open(rng, 0.0, 1.0);
      d.weights = {total * share, total * (1.0 - share)};
      break;
    }
    case InequalityId::jensen:
      add_mats(prm.k, box);
      d.weights = random_simplex(prm.k, rng);
      break;
    case InequalityId::index_superadd:
    case InequalityId::index_chain: {
      add_mats(prm.k, box);
      d.weights = random_simplex(prm.k, rng);
      const double total = uniform_open(rng, 0.5, 1.0);
      for (double& w : d.weights) w *= total;
      if (problem.id == InequalityId::index_superadd) {
        // Random split with both parts non-empty.
        std::uniform_int_distribution<int> bit(0, 1);
        do {
          d.split.assign(static_cast<std::size_t>(prm.k), 0);
          for (int& s : d.split) s = bit(rng);
        } while (std::count(d.split.begin(), d.split.end(), 0) == 0 ||
                 std::count(d.split.begin(), d.split.end(), 1) == 0);
      }
      break;
    }
    case InequalityId::hansen_pedersen:
      add_mats(2, box);
      d.generators = {random_gaussian(2 * n, 2 * n, rng)};
      break;
    case InequalityId::contraction:
      add_mats(1, box);
      d.generators = {random_gaussian(n, n, rng)};
      d.shrink = prm.isometry ? 1.0 : uniform_open(rng, 1.0, 2.0);
      break;
    case InequalityId::projection: {
      add_mats(1, box);
      d.generators = {random_gaussian(n, n, rng)};
      std::uniform_int_distribution<int> r(0, n);
      d.rank = prm.rank >= 0 ? prm.rank : r(rng);
      break;
    }
    case InequalityId::resolution: {
      d.weights = random_simplex(prm.k, rng);
      for (int i = 0; i < prm.k; ++i) {
        d.generators.push_back(random_gaussian(n, n, rng));
        d.points.push_back(box.lo == box.hi ? box.lo : std::uniform_real_distribution<double>(box.lo, box.hi)(rng));
      }
      break;
    }
    case InequalityId::cdj:
      add_mats(1, box);
      for (int i = 0; i < prm.m_kraus; ++i) d.generators.push_back(random_gaussian(n, n, rng));
      break;
    case InequalityId::inverse_ratio: {
      // B = A + P with both halves of K so that σ(B) stays inside K.
      const double half = (box.hi - box.lo) / 2.0;
      add_mats(1, Interval::closed(box.lo, box.lo + half));
      add_mats(1, Interval::closed(0.0, half));
      break;
    }
    case InequalityId::power_mean_monotone:
    case InequalityId::log_euclidean_limit:
    case InequalityId::chaotic_mean:
      add_mats(2, box);
      break;
  }
  // Degenerate raw inputs are redrawn a bounded number of times.
  for (int attempt = 0;; ++attempt) {
    try {
      realize(problem, d);
      return d;
    } catch (const NumericalError&) {
      if (attempt >= 50) throw;
      for (CMatrix& g : d.generators) g = random_gaussian(static_cast<int>(g.rows()), static_cast<int>(g.cols()), rng);
    }
  }
}

void realize(const Problem& problem, Draft& d) {
  Operands ops;
  ops.n = d.n;
  ops.weights = d.weights;
  ops.split = d.split;
  switch (problem.id) {
    case InequalityId::hansen_pedersen:
      ops.pair = coisometry_from_gaussian(d.generators.at(0));
      ops.mats = d.mats;
      break;
    case InequalityId::contraction:
      ops.contraction = problem.params.isometry ? unitary_from_gaussian(d.generators.at(0))
                                                : contraction_from_gaussian(d.generators.at(0), d.shrink);
      ops.mats = d.mats;
      break;
    case InequalityId::projection:
      ops.projection = projection_from_gaussian(d.generators.at(0), d.rank);
      ops.mats = d.mats;
      break;
    case InequalityId::resolution:
      ops.resolution = resolution_from_gaussians(d.weights, d.generators, d.points);
      break;
    case InequalityId::cdj:
      ops.map = unital_map_from_gaussians(d.generators, problem.params.transpose_twist);
      ops.mats = d.mats;
      break;
    case InequalityId::inverse_ratio:
      ops.mats = {d.mats.at(0), d.mats.at(0) + d.mats.at(1)};
      break;
    default:
      ops.mats = d.mats;
      break;
  }
  d.operands = std::move(ops);
}

CheckOutcome evaluate(const Problem& problem, const Operands& ops) {
  const OracleSetting& s = problem.setting;
  switch (problem.id) {
    case InequalityId::definition:
      return check_definition(s, mat(ops, 0), mat(ops, 1), weight(ops, 0));
    case InequalityId::subunit:
      return check_subunit_weights(s, mat(ops, 0), mat(ops, 1), weight(ops, 0), weight(ops, 1));
    case InequalityId::jensen:
      return check_jensen(s, ops.mats, ops.weights);
    case InequalityId::index_superadd: {
      const IndexSetInstance inst{ops.weights, ops.mats};
      if (ops.split.size() != ops.mats.size()) throw UsageError("index split must label every matrix");
      std::vector<int> m, e;
      for (std::size_t i = 0; i < ops.split.size(); ++i) (ops.split[i] == 0 ? m : e).push_back(static_cast<int>(i));
      return check_index_superadditive(s, inst, m, e);
    }
    case InequalityId::index_chain: {
      const IndexSetInstance inst{ops.weights, ops.mats};
      const IndexChainReport rep = check_index_chain(s, inst);
      CheckOutcome worst = rep.worst();
      double total = 0.0;
      for (const auto* list : {&rep.chain, &rep.pair_bounds})
        for (const CheckOutcome& c : *list) total += c.wall_time;
      worst.wall_time = total;
      return worst;
    }
    case InequalityId::hansen_pedersen:
      return check_hansen_pedersen(s, mat(ops, 0), mat(ops, 1), need(ops.pair, "contraction pair"));
    case InequalityId::contraction:
      return check_contraction_form(s, mat(ops, 0), need(ops.contraction, "contraction V"));
    case InequalityId::projection:
      return check_projection_form(s, mat(ops, 0), need(ops.projection, "projection Q"));
    case InequalityId::resolution:
      return check_resolution_form(s, need(ops.resolution, "resolution of identity"));
    case InequalityId::cdj:
      return check_cdj(s, mat(ops, 0), need(ops.map, "unital map"));
    case InequalityId::inverse_ratio:
      return check_inverse_ratio(s, mat(ops, 0), mat(ops, 1));
    case InequalityId::power_mean_monotone:
      return check_power_mean_monotone(mat(ops, 0), mat(ops, 1), problem.params.p1, problem.params.p2, s.tol());
    case InequalityId::log_euclidean_limit: {
      const auto start = std::chrono::steady_clock::now();
      const auto& ps = problem.params.limit_ps;
      const LimitReport rep = check_log_euclidean_limit(mat(ops, 0), mat(ops, 1), ps, s.tol());
      CheckOutcome out;
      out.id = problem.id;
      out.lhs = power_mean(mat(ops, 0), mat(ops, 1), ps.back(), s.tol());
      out.rhs = log_euclidean_mean(mat(ops, 0), mat(ops, 1), s.tol());
      // Slack of the weakest condition: strict decrease and final residual bound.
      double slack = problem.params.limit_residual - rep.final_residual();
      for (std::size_t i = 1; i < rep.residuals.size(); ++i)
        slack = std::min(slack, rep.residuals[i - 1] - rep.residuals[i]);
      out.verdict.gap = slack;
      out.verdict.scale = out.lhs.spectral_norm() + out.rhs.spectral_norm();
      out.verdict.band = 0.0;
      out.verdict.holds = rep.strictly_decreasing && rep.final_residual() <= problem.params.limit_residual;
      out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return out;
    }
    case InequalityId::chaotic_mean:
      return check_chaotic_mean(s, mat(ops, 0), mat(ops, 1));
  }
  throw UsageError("unhandled inequality");
}

json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& re = j.at("re");
  const json im = j.value("im", json::array());
  if (rows < 1 || cols < 1 || re.size() != static_cast<std::size_t>(rows * cols) ||
      (!im.empty() && im.size() != re.size())) {
    throw UsageError("matrix JSON: entry count does not match rows x cols");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto idx = static_cast<std::size_t>(i * cols + c);
      m(i, c) = Complex(re[idx].get<double>(), im.empty() ? 0.0 : im[idx].get<double>());
    }
  return m;
}

json witness_to_json(const Problem& problem, const Operands& ops, const SeedSpec& seed, const CheckOutcome& outcome) {
  json operands{{"n", ops.n}};
  json mats = json::array();
  for (const HermitianMatrix& m : ops.mats) mats.push_back(matrix_to_json(m.matrix()));
  operands["matrices"] = std::move(mats);
  operands["weights"] = ops.weights;
  if (!ops.split.empty()) operands["split"] = ops.split;
  if (ops.pair) {
    operands["C"] = matrix_to_json(ops.pair->c());
    operands["D"] = matrix_to_json(ops.pair->d());
  }
  if (ops.contraction) operands["V"] = matrix_to_json(*ops.contraction);
  if (ops.projection) operands["Q"] = matrix_to_json(ops.projection->matrix());
  if (ops.resolution) {
    json res{{"weights", ops.resolution->weights}, {"points", ops.resolution->points}};
    json a = json::array();
    for (const HermitianMatrix& m : ops.resolution->operators) a.push_back(matrix_to_json(m.matrix()));
    res["operators"] = std::move(a);
    operands["resolution"] = std::move(res);
  }
  if (ops.map) {
    json k = json::array();
    for (const CMatrix& m : ops.map->kraus()) k.push_back(matrix_to_json(m));
    operands["kraus"] = std::move(k);
    operands["transpose_input"] = ops.map->transpose_input();
  }
  const ToleranceConfig& tol = problem.tol();
  return json{{"schema_version", kWitnessSchemaVersion},
              {"kind", "opgx-witness"},
              {"inequality", std::string(to_string(problem.id))},
              {"f", problem.f_spec},
              {"h", problem.h_spec},
              {"p", problem.p()},
              {"K", interval_to_json(problem.k())},
              {"tol", {{"atol", tol.atol}, {"rtol", tol.rtol}}},
              {"params", problem.params.to_json()},
              {"seed", {{"master", seed.master_seed}, {"trial", seed.trial_index}, {"derived", seed.derived()}}},
              {"operands", std::move(operands)},
              {"gap", outcome.gap()},
              {"scale", outcome.verdict.scale},
              {"band", outcome.verdict.band},
              {"holds", outcome.holds()},
              {"certified_violation", outcome.certified_violation()}};
}

Witness witness_from_json(const json& j) {
  try {
    if (j.value("kind", std::string()) != "opgx-witness") throw UsageError("not a witness file (kind != opgx-witness)");
    const int version = j.at("schema_version").get<int>();
    if (version != kWitnessSchemaVersion) throw UsageError("unsupported witness schema_version " + std::to_string(version));
    const std::string name = j.at("inequality").get<std::string>();
    const auto id = parse_inequality(name);
    if (!id) throw UsageError("unknown inequality '" + name + "'");
    ToleranceConfig tol;
    if (j.contains("tol")) {
      tol.atol = j["tol"].at("atol").get<double>();
      tol.rtol = j["tol"].at("rtol").get<double>();
    }
    Problem problem = make_problem(*id, j.at("f").get<std::string>(), j.at("h").get<std::string>(),
                                   j.at("p").get<double>(), interval_from_json(j.at("K")), tol,
                                   TrialParams::from_json(j.value("params", json())));
    const json& o = j.at("operands");
    Operands ops;
    ops.n = o.at("n").get<int>();
    for (const json& m : o.value("matrices", json::array())) ops.mats.emplace_back(matrix_from_json(m));
    ops.weights = o.value("weights", std::vector<double>{});
    ops.split = o.value("split", std::vector<int>{});
    if (o.contains("C")) ops.pair = ContractionPair(matrix_from_json(o["C"]), matrix_from_json(o["D"]));
    if (o.contains("V")) ops.contraction = matrix_from_json(o["V"]);
    if (o.contains("Q")) ops.projection = HermitianMatrix(matrix_from_json(o["Q"]));
    if (o.contains("resolution")) {
      const json& r = o["resolution"];
      ResolutionOfIdentity res;
      res.weights = r.at("weights").get<std::vector<double>>();
      res.points = r.at("points").get<std::vector<double>>();
      for (const json& m : r.at("operators")) res.operators.emplace_back(matrix_from_json(m));
      ops.resolution = std::move(res);
    }
    if (o.contains("kraus")) {
      std::vector<CMatrix> kraus;
      for (const json& m : o["kraus"]) kraus.push_back(matrix_from_json(m));
      ops.map = UnitalPositiveMap(std::move(kraus), o.value("transpose_input", false));
    }
    Witness w{std::move(problem), std::move(ops), SeedSpec{}, std::nullopt};
    if (j.contains("seed")) {
      w.seed.master_seed = j["seed"].value("master", std::uint64_t{0});
      w.seed.trial_index = j["seed"].value("trial", std::uint64_t{0});
    }
    if (j.contains("gap")) w.recorded_gap = j["gap"].get<double>();
    return w;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed witness: ") + e.what());
  }
}

}  // namespace opgx
