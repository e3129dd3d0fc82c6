#include "opgx/oracles.hpp"

#include "opgx/errors.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace opgx {

namespace {

constexpr int kSupermultGrid = 64;
constexpr int kSupermultRandom = 256;
constexpr int kHalfGrid = 999;
constexpr double kWeightSumTol = 1e-12;

constexpr std::array kAllIds{
    InequalityId::definition,      InequalityId::subunit,          InequalityId::jensen,
    InequalityId::index_superadd,  InequalityId::index_chain,      InequalityId::hansen_pedersen,
    InequalityId::contraction,     InequalityId::projection,       InequalityId::resolution,
    InequalityId::cdj,             InequalityId::inverse_ratio,    InequalityId::chaotic_mean,
    InequalityId::power_mean_monotone, InequalityId::log_euclidean_limit,
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <class Fn>
CheckOutcome timed(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  CheckOutcome out = fn();
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw UsageError("operands have different dimensions");
}

void require_pd(const HermitianMatrix& a, std::string_view name, const ToleranceConfig& tol) {
  const double lmin = a.min_eigenvalue();
  if (!(lmin > tol.atol)) {
    throw HypothesisError(std::string(name) + " positive definite", "lambda_min = " + num(lmin));
  }
}

double h_at(const OracleSetting& s, double x, std::string_view what) {
  if (!s.h().domain().contains(x)) {
    throw HypothesisError(std::string(what) + " in domain of h",
                          num(x) + " outside " + s.h().domain().to_string());
  }
  return s.h()(x);
}

// Shared by definition, sub-unit weights and Jensen so the k = 2 cases go
// through identical arithmetic.
CheckOutcome weighted_check(InequalityId id, const OracleSetting& s, std::span<const HermitianMatrix> as,
                            std::span<const double> weights) {
  const HermitianMatrix lhs = s.apply_f(weighted_power_mean(as, weights, s.p(), s.tol()));
  HermitianMatrix rhs = HermitianMatrix::zero(as.front().dim());
  for (std::size_t i = 0; i < as.size(); ++i) rhs = rhs + h_at(s, weights[i], "weight") * s.apply_f(as[i]);
  return make_outcome(id, lhs, rhs, s.tol());
}

}  // namespace

std::string_view to_string(InequalityId id) {
  switch (id) {
    case InequalityId::definition: return "definition";
    case InequalityId::subunit: return "subunit";
    case InequalityId::jensen: return "jensen";
    case InequalityId::index_superadd: return "index_superadd";
    case InequalityId::index_chain: return "index_chain";
    case InequalityId::hansen_pedersen: return "hansen_pedersen";
    case InequalityId::contraction: return "contraction";
    case InequalityId::projection: return "projection";
    case InequalityId::resolution: return "resolution";
    case InequalityId::cdj: return "cdj";
    case InequalityId::inverse_ratio: return "inverse_ratio";
    case InequalityId::chaotic_mean: return "chaotic_mean";
    case InequalityId::power_mean_monotone: return "power_mean_monotone";
    case InequalityId::log_euclidean_limit: return "log_euclidean_limit";
  }
  return "?";
}

std::optional<InequalityId> parse_inequality(std::string_view name) {
  for (InequalityId id : kAllIds)
    if (to_string(id) == name) return id;
  return std::nullopt;
}

std::span<const InequalityId> all_inequalities() { return kAllIds; }

OracleSetting::OracleSetting(ScalarFunction f, WeightFunction h, double p, Interval k, ToleranceConfig tol)
    : f_(std::move(f)), h_(std::move(h)), p_(p), k_(k), tol_(tol) {
  tol_.validate();
  k_.validate();
  if (!(p_ > 0.0) || !std::isfinite(p_)) throw UsageError("p must be a positive number, got " + num(p_));
  supermult_ = check_supermultiplicative(h_, h_.domain(), kSupermultGrid, kSupermultRandom, 0);
  half_ = check_half_condition(h_, kHalfGrid);
}

HermitianMatrix OracleSetting::apply_f(const HermitianMatrix& a) const {
  return apply_scalar_function(f_, a, k_, tol_);
}

void OracleSetting::require_supermultiplicative() const {
  if (!supermult_.holds) {
    throw HypothesisError("h super-multiplicative",
                          "h(xy) - h(x)h(y) = " + num(supermult_.min_discrepancy) + " at (" +
                              num(supermult_.arg_min.at(0)) + ", " + num(supermult_.arg_min.at(1)) + ")");
  }
}

void OracleSetting::require_half_condition() const {
  if (!half_.holds) {
    throw HypothesisError("2h(1/2) <= h(a)/a",
                          "discrepancy " + num(half_.min_discrepancy) + " at a = " + num(half_.arg_min.at(0)));
  }
}

void OracleSetting::require_f_vanishes_at_zero() const {
  if (!f_.vanishes_at_zero()) throw HypothesisError("f(0) = 0", f_.spec() + " does not vanish at 0");
}

void OracleSetting::require_zero_in_k() const {
  if (!k_.contains(0.0)) throw HypothesisError("0 in K", "K = " + k_.to_string());
}

void OracleSetting::require_spectrum_in_k(const HermitianMatrix& a, std::string_view name) const {
  const SpectrumCheck sc = spectrum_in_interval(a, k_, tol_);
  if (!sc.inside) {
    throw HypothesisError("spectrum of " + std::string(name) + " in K",
                          "eigenvalue " + num(*sc.worst_offender) + " outside " + k_.to_string());
  }
}

CheckOutcome make_outcome(InequalityId id, HermitianMatrix lhs, HermitianMatrix rhs, const ToleranceConfig& tol) {
  CheckOutcome out;
  out.id = id;
  out.verdict = loewner_compare(lhs, rhs, tol);
  out.lhs = std::move(lhs);
  out.rhs = std::move(rhs);
  return out;
}

HermitianMatrix weighted_power_mean(std::span<const HermitianMatrix> as, std::span<const double> weights, double p,
                                    const ToleranceConfig& tol) {
  if (as.empty() || as.size() != weights.size()) throw UsageError("weighted_power_mean: one weight per matrix");
  HermitianMatrix acc = HermitianMatrix::zero(as.front().dim());
  for (std::size_t i = 0; i < as.size(); ++i) {
    require_same_dim(as.front(), as[i]);
    acc = acc + weights[i] * matrix_power(as[i], p, tol);
  }
  return matrix_power(acc, 1.0 / p, tol);
}

CheckOutcome check_definition(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b,
                              double alpha) {
  return timed([&] {
    require_same_dim(a, b);
    s.require_supermultiplicative();
    if (!(alpha > 0.0 && alpha < 1.0)) throw HypothesisError("alpha in (0,1)", "alpha = " + num(alpha));
    s.require_spectrum_in_k(a, "A");
    s.require_spectrum_in_k(b, "B");
    const std::array as{a, b};
    const std::array ws{alpha, 1.0 - alpha};
    return weighted_check(InequalityId::definition, s, as, ws);
  });
}

CheckOutcome check_subunit_weights(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b,
                                   double alpha, double beta) {
  return timed([&] {
    require_same_dim(a, b);
    s.require_supermultiplicative();
    s.require_f_vanishes_at_zero();
    s.require_zero_in_k();
    if (!(alpha > 0.0 && beta > 0.0 && alpha + beta <= 1.0 + kWeightSumTol)) {
      throw HypothesisError("alpha, beta > 0 with alpha + beta <= 1",
                            "alpha = " + num(alpha) + ", beta = " + num(beta));
    }
    s.require_spectrum_in_k(a, "A");
    s.require_spectrum_in_k(b, "B");
    const std::array as{a, b};
    const std::array ws{alpha, beta};
    return weighted_check(InequalityId::subunit, s, as, ws);
  });
}

CheckOutcome check_jensen(const OracleSetting& s, std::span<const HermitianMatrix> as,
                          std::span<const double> alphas) {
  return timed([&] {
    if (as.size() < 2 || as.size() != alphas.size()) throw UsageError("jensen: need k >= 2 matrices and weights");
    s.require_supermultiplicative();
    double total = 0.0;
    for (double a : alphas) {
      if (!(a > 0.0 && a < 1.0)) throw HypothesisError("alpha_i in (0,1)", "alpha = " + num(a));
      total += a;
    }
    if (std::abs(total - 1.0) > kWeightSumTol) throw HypothesisError("sum alpha_i = 1", "sum = " + num(total));
    for (std::size_t i = 0; i < as.size(); ++i) s.require_spectrum_in_k(as[i], "A_" + std::to_string(i + 1));
    return weighted_check(InequalityId::jensen, s, as, alphas);
  });
}

void IndexSetInstance::validate() const {
  if (weights.empty() || weights.size() != matrices.size()) {
    throw UsageError("index-set instance: one positive weight per matrix");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw HypothesisError("w_i > 0", "w = " + num(w));
  }
  for (const HermitianMatrix& m : matrices) require_same_dim(matrices.front(), m);
}

double IndexSetInstance::total_weight(std::span<const int> e) const {
  double total = 0.0;
  for (int i : e) total += weights.at(static_cast<std::size_t>(i));
  return total;
}

HermitianMatrix index_set_value(const OracleSetting& s, const IndexSetInstance& inst, std::span<const int> e) {
  inst.validate();
  if (e.empty()) throw UsageError("index set must be non-empty");
  std::vector<HermitianMatrix> as;
  std::vector<double> ws;
  double total = inst.total_weight(e);
  // Summation roundoff may push W_E a few ulps past the end of dom h.
  const Interval& dom = s.h().domain();
  if (std::isfinite(dom.hi) && total > dom.hi && total <= dom.hi * (1.0 + 1e-14)) total = dom.hi;
  for (int i : e) {
    if (i < 0 || static_cast<std::size_t>(i) >= inst.size()) throw UsageError("index " + std::to_string(i) + " out of range");
    as.push_back(inst.matrices[static_cast<std::size_t>(i)]);
    ws.push_back(inst.weights[static_cast<std::size_t>(i)] / total);
  }
  HermitianMatrix value = h_at(s, total, "W_E") * s.apply_f(weighted_power_mean(as, ws, s.p(), s.tol()));
  for (int i : e) {
    const auto idx = static_cast<std::size_t>(i);
    value = value - h_at(s, inst.weights[idx], "w_i") * s.apply_f(inst.matrices[idx]);
  }
  return value;
}

CheckOutcome check_index_superadditive(const OracleSetting& s, const IndexSetInstance& inst, std::span<const int> m,
                                       std::span<const int> e) {
  return timed([&] {
    s.require_supermultiplicative();
    if (m.empty() || e.empty()) throw UsageError("index sets M and E must be non-empty");
    std::vector<int> both(m.begin(), m.end());
    for (int i : e) {
      if (std::find(m.begin(), m.end(), i) != m.end()) {
        throw HypothesisError("M and E disjoint", "index " + std::to_string(i) + " in both");
      }
      both.push_back(i);
    }
    for (int i : both) s.require_spectrum_in_k(inst.matrices.at(static_cast<std::size_t>(i)), "A_i");
    HermitianMatrix lhs = index_set_value(s, inst, both);
    HermitianMatrix rhs = index_set_value(s, inst, m) + index_set_value(s, inst, e);
    return make_outcome(InequalityId::index_superadd, std::move(lhs), std::move(rhs), s.tol());
  });
}

bool IndexChainReport::all_hold() const {
  auto ok = [](const CheckOutcome& c) { return c.holds(); };
  return std::all_of(chain.begin(), chain.end(), ok) && std::all_of(pair_bounds.begin(), pair_bounds.end(), ok);
}

const CheckOutcome& IndexChainReport::worst() const {
  const CheckOutcome* w = nullptr;
  // Ranked by gap relative to band, so outcomes of different magnitude compare.
  auto key = [](const CheckOutcome& c) { return c.gap() / std::max(c.verdict.band, 1e-300); };
  for (const auto* list : {&chain, &pair_bounds})
    for (const CheckOutcome& c : *list)
      if (w == nullptr || key(c) < key(*w)) w = &c;
  if (w == nullptr) throw UsageError("empty index chain report");
  return *w;
}

IndexChainReport check_index_chain(const OracleSetting& s, const IndexSetInstance& inst) {
  s.require_supermultiplicative();
  const int k = static_cast<int>(inst.size());
  if (k < 2) throw UsageError("index chain needs k >= 2");
  for (const HermitianMatrix& a : inst.matrices) s.require_spectrum_in_k(a, "A_i");
  std::vector<HermitianMatrix> prefix_values;  // F(M_l) for l = 2..k
  std::vector<int> prefix{0};
  for (int l = 2; l <= k; ++l) {
    prefix.push_back(l - 1);
    prefix_values.push_back(index_set_value(s, inst, prefix));
  }
  IndexChainReport rep;
  const int n = inst.matrices.front().dim();
  for (int l = k; l >= 3; --l) {
    CheckOutcome c = timed([&] {
      return make_outcome(InequalityId::index_chain, prefix_values[static_cast<std::size_t>(l - 2)],
                          prefix_values[static_cast<std::size_t>(l - 3)], s.tol());
    });
    rep.chain.push_back(std::move(c));
  }
  rep.chain.push_back(timed(
      [&] { return make_outcome(InequalityId::index_chain, prefix_values.front(), HermitianMatrix::zero(n), s.tol()); }));
  const HermitianMatrix& full = prefix_values.back();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const std::array pair{i, j};
      rep.pair_bounds.push_back(timed([&] {
        return make_outcome(InequalityId::index_chain, full, index_set_value(s, inst, pair), s.tol());
      }));
    }
  return rep;
}

CheckOutcome check_hansen_pedersen(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b,
                                   const ContractionPair& pair) {
  return timed([&] {
    require_same_dim(a, b);
    if (pair.dim() != a.dim()) throw UsageError("hansen_pedersen: pair dimension mismatch");
    s.require_supermultiplicative();
    s.require_spectrum_in_k(a, "A");
    s.require_spectrum_in_k(b, "B");
    const CMatrix ct = pair.c().adjoint();
    const CMatrix dt = pair.d().adjoint();
    const HermitianMatrix inner =
        matrix_power(a, s.p(), s.tol()).congruence(ct) + matrix_power(b, s.p(), s.tol()).congruence(dt);
    HermitianMatrix lhs = s.apply_f(matrix_power(inner, 1.0 / s.p(), s.tol()));
    HermitianMatrix rhs = s.two_h_half() * (s.apply_f(a).congruence(ct) + s.apply_f(b).congruence(dt));
    return make_outcome(InequalityId::hansen_pedersen, std::move(lhs), std::move(rhs), s.tol());
  });
}

CheckOutcome check_contraction_form(const OracleSetting& s, const HermitianMatrix& a, const CMatrix& v) {
  return timed([&] {
    if (v.rows() != a.dim() || v.cols() != a.dim()) throw UsageError("contraction: dimension mismatch");
    s.require_supermultiplicative();
    s.require_half_condition();
    s.require_f_vanishes_at_zero();
    s.require_zero_in_k();
    const double norm = spectral_norm(v);
    if (norm > 1.0 + s.tol().atol) throw HypothesisError("||V|| <= 1", "||V||_2 = " + num(norm));
    s.require_spectrum_in_k(a, "A");
    HermitianMatrix lhs = s.apply_f(matrix_power(matrix_power(a, s.p(), s.tol()).congruence(v), 1.0 / s.p(), s.tol()));
    HermitianMatrix rhs = s.two_h_half() * s.apply_f(a).congruence(v);
    return make_outcome(InequalityId::contraction, std::move(lhs), std::move(rhs), s.tol());
  });
}

CheckOutcome check_projection_form(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& q) {
  return timed([&] {
    require_same_dim(a, q);
    s.require_supermultiplicative();
    s.require_half_condition();
    s.require_f_vanishes_at_zero();
    s.require_zero_in_k();
    const double idem = (q.matrix() * q.matrix() - q.matrix()).norm();
    if (idem > 1e-12 * q.dim()) throw HypothesisError("Q orthogonal projection", "||Q^2 - Q||_F = " + num(idem));
    s.require_spectrum_in_k(a, "A");
    const CMatrix& qm = q.matrix();
    HermitianMatrix lhs = s.apply_f(matrix_power(matrix_power(a, s.p(), s.tol()).congruence(qm), 1.0 / s.p(), s.tol()));
    HermitianMatrix rhs = s.two_h_half() * s.apply_f(a).congruence(qm);
    return make_outcome(InequalityId::projection, std::move(lhs), std::move(rhs), s.tol());
  });
}

CheckOutcome check_resolution_form(const OracleSetting& s, const ResolutionOfIdentity& res) {
  return timed([&] {
    s.require_supermultiplicative();
    s.require_half_condition();
    s.require_f_vanishes_at_zero();
    res.validate(s.k(), s.tol());
    const int n = res.dim();
    HermitianMatrix inner = HermitianMatrix::zero(n);
    HermitianMatrix rhs = HermitianMatrix::zero(n);
    for (std::size_t i = 0; i < res.operators.size(); ++i) {
      const double x = std::clamp(res.points[i], s.k().lo, s.k().hi);
      inner = inner + (res.weights[i] * std::pow(x, s.p())) * res.operators[i];
      rhs = rhs + (h_at(s, res.weights[i], "alpha_i") * s.f()(x)) * res.operators[i];
    }
    HermitianMatrix lhs = s.apply_f(matrix_power(inner, 1.0 / s.p(), s.tol()));
    return make_outcome(InequalityId::resolution, std::move(lhs), std::move(rhs), s.tol());
  });
}

CheckOutcome check_cdj(const OracleSetting& s, const HermitianMatrix& a, const UnitalPositiveMap& phi) {
  return timed([&] {
    if (phi.input_dim() != a.dim()) throw UsageError("cdj: map input dimension mismatch");
    s.require_supermultiplicative();
    s.require_half_condition();
    s.require_f_vanishes_at_zero();
    if (phi.unital_residual() > 1e-12 * phi.output_dim()) {
      throw HypothesisError("Phi unital", "residual " + num(phi.unital_residual()));
    }
    s.require_spectrum_in_k(a, "A");
    HermitianMatrix lhs = s.apply_f(matrix_power(phi(matrix_power(a, s.p(), s.tol())), 1.0 / s.p(), s.tol()));
    HermitianMatrix rhs = s.two_h_half() * phi(s.apply_f(a));
    return make_outcome(InequalityId::cdj, std::move(lhs), std::move(rhs), s.tol());
  });
}

CheckOutcome check_inverse_ratio(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b) {
  return timed([&] {
    require_same_dim(a, b);
    if (s.p() != 1.0) throw HypothesisError("p = 1", "inverse-ratio bound is stated for p = 1, got " + num(s.p()));
    s.require_supermultiplicative();
    s.require_half_condition();
    s.require_f_vanishes_at_zero();
    require_pd(a, "A", s.tol());
    require_pd(b, "B", s.tol());
    s.require_spectrum_in_k(a, "A");
    s.require_spectrum_in_k(b, "B");
    const OrderVerdict order = loewner_compare(a, b, s.tol());
    if (!order.holds) throw HypothesisError("A <= B", "lambda_min(B - A) = " + num(order.gap));
    const ScalarFunction& f = s.f();
    const Interval& k = s.k();
    auto ratio = [&](double t) { return f(std::clamp(t, k.lo, k.hi)) / t; };
    HermitianMatrix lhs = map_spectrum(a, ratio);
    HermitianMatrix rhs = s.two_h_half() * map_spectrum(b, ratio);
    return make_outcome(InequalityId::inverse_ratio, std::move(lhs), std::move(rhs), s.tol());
  });
}

HermitianMatrix power_mean(const HermitianMatrix& a, const HermitianMatrix& b, double p, const ToleranceConfig& tol) {
  require_same_dim(a, b);
  const HermitianMatrix avg = 0.5 * (matrix_power(a, p, tol) + matrix_power(b, p, tol));
  return matrix_power(avg, 1.0 / p, tol);
}

HermitianMatrix log_euclidean_mean(const HermitianMatrix& a, const HermitianMatrix& b, const ToleranceConfig& tol) {
  require_same_dim(a, b);
  return matrix_exp(0.5 * (matrix_log(a, tol) + matrix_log(b, tol)));
}

CheckOutcome check_power_mean_monotone(const HermitianMatrix& a, const HermitianMatrix& b, double p1, double p2,
                                       const ToleranceConfig& tol) {
  return timed([&] {
    if (!(p1 >= 1.0 && p2 > p1)) {
      throw HypothesisError("1 <= p1 < p2", "p1 = " + num(p1) + ", p2 = " + num(p2));
    }
    for (const HermitianMatrix* m : {&a, &b}) {
      if (m->min_eigenvalue() < -clamp_tolerance(*m)) throw HypothesisError("A, B PSD", "negative eigenvalue");
    }
    return make_outcome(InequalityId::power_mean_monotone, power_mean(a, b, p1, tol), power_mean(a, b, p2, tol), tol);
  });
}

LimitReport check_log_euclidean_limit(const HermitianMatrix& a, const HermitianMatrix& b, std::span<const double> ps,
                                      const ToleranceConfig& tol) {
  if (ps.empty()) throw UsageError("log-Euclidean limit needs at least one p");
  require_pd(a, "A", tol);
  require_pd(b, "B", tol);
  const HermitianMatrix target = log_euclidean_mean(a, b, tol);
  const double denom = target.frobenius_norm();
  LimitReport rep;
  for (double p : ps) {
    if (!(p > 0.0)) throw UsageError("log-Euclidean limit: p must be positive");
    rep.ps.push_back(p);
    rep.residuals.push_back((power_mean(a, b, p, tol) - target).frobenius_norm() / denom);
  }
  for (std::size_t i = 1; i < rep.residuals.size(); ++i)
    if (!(rep.residuals[i] < rep.residuals[i - 1])) rep.strictly_decreasing = false;
  return rep;
}

CheckOutcome check_chaotic_mean(const OracleSetting& s, const HermitianMatrix& a, const HermitianMatrix& b) {
  return timed([&] {
    require_same_dim(a, b);
    require_pd(a, "A", s.tol());
    require_pd(b, "B", s.tol());
    s.require_spectrum_in_k(a, "A");
    s.require_spectrum_in_k(b, "B");
    HermitianMatrix lhs = s.apply_f(log_euclidean_mean(a, b, s.tol()));
    HermitianMatrix rhs = 0.5 * (s.apply_f(a) + s.apply_f(b));
    CheckOutcome out = make_outcome(InequalityId::chaotic_mean, std::move(lhs), std::move(rhs), s.tol());
    out.exploratory = true;
    return out;
  });
}

}  // namespace opgx
