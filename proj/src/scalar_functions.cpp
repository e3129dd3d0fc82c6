#include "opgx/scalar_functions.hpp"

#include "opgx/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace opgx {

namespace {

constexpr int kNonnegGrid = 1000;
constexpr double kRatioTol = 1e-12;

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view context) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError("cannot parse number '" + std::string(s) + "' in '" + std::string(context) + "'");
  }
  return v;
}

// Splits on commas not nested inside parentheses.
std::vector<std::string_view> split_top_level(std::string_view s) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (depth < 0) throw UsageError("unbalanced parentheses in '" + std::string(s) + "'");
    if (s[i] == ',' && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw UsageError("unbalanced parentheses in '" + std::string(s) + "'");
  parts.push_back(trim(s.substr(start)));
  return parts;
}

double parse_power_exponent(std::string_view text) {
  // power:s=<x>
  const std::string_view rest = text.substr(std::string_view("power:").size());
  if (rest.substr(0, 2) != "s=") throw UsageError("expected power:s=<exponent>, got '" + std::string(text) + "'");
  return parse_number(rest.substr(2), text);
}

}  // namespace

ScalarFunction::ScalarFunction(Family family, Interval domain)
    : family_(std::move(family)), domain_(domain) {
  domain_.validate();
}

ScalarFunction ScalarFunction::power(double s, Interval domain) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("power exponent must be finite and >= 0, got " + num(s));
  ScalarFunction f(Power{s}, domain);
  return f;
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coeffs, Interval domain) {
  if (coeffs.empty()) throw UsageError("polynomial needs at least one coefficient");
  ScalarFunction f(Polynomial{std::move(coeffs)}, domain);
  f.validate_nonnegative();
  return f;
}

ScalarFunction ScalarFunction::affine_combo(std::vector<Term> terms) {
  if (terms.empty()) throw UsageError("affine combination needs at least one term");
  const Interval domain = terms.front().fn->domain();
  for (const Term& t : terms) {
    if (!(t.weight > 0.0) || !std::isfinite(t.weight)) throw UsageError("combination weights must be positive");
    const Interval& d = t.fn->domain();
    if (d.lo != domain.lo || d.hi != domain.hi || d.closed_lo != domain.closed_lo || d.closed_hi != domain.closed_hi) {
      throw UsageError("cannot combine functions on different domains " + domain.to_string() + " and " +
                       d.to_string());
    }
  }
  ScalarFunction f(AffineCombo{std::move(terms)}, domain);
  f.validate_nonnegative();
  return f;
}

double ScalarFunction::eval_unchecked(double x) const {
  return std::visit(
      [x](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Power>) {
          return std::pow(x, fam.s);
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          double acc = 0.0;
          for (auto it = fam.coeffs.rbegin(); it != fam.coeffs.rend(); ++it) acc = acc * x + *it;
          return acc;
        } else {
          double acc = 0.0;
          for (const Term& t : fam.terms) acc += t.weight * t.fn->eval_unchecked(x);
          return acc;
        }
      },
      family_);
}

double ScalarFunction::operator()(double x) const {
  // f is continuous, so the closure of K is admissible.
  if (!(x >= domain_.lo) || (std::isfinite(domain_.hi) && x > domain_.hi)) {
    throw NumericalError(ErrorKind::domain, "f evaluated at " + num(x) + " outside " + domain_.to_string());
  }
  return eval_unchecked(x);
}

void ScalarFunction::validate_nonnegative() const {
  const Interval grid = domain_.capped();
  for (int i = 0; i < kNonnegGrid; ++i) {
    const double x = grid.lo + (grid.hi - grid.lo) * i / (kNonnegGrid - 1);
    const double v = eval_unchecked(x);
    if (!(v >= 0.0)) {
      throw UsageError("function " + spec() + " is negative at t=" + num(x) + " (value " + num(v) + ")");
    }
  }
}

bool ScalarFunction::vanishes_at_zero() const {
  return std::visit(
      [](const auto& fam) -> bool {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Power>) {
          return fam.s > 0.0;
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return fam.coeffs.front() == 0.0;
        } else {
          return std::all_of(fam.terms.begin(), fam.terms.end(),
                             [](const Term& t) { return t.fn->vanishes_at_zero(); });
        }
      },
      family_);
}

std::optional<double> ScalarFunction::power_exponent() const {
  if (const auto* p = std::get_if<Power>(&family_)) return p->s;
  return std::nullopt;
}

std::string ScalarFunction::spec() const {
  return std::visit(
      [](const auto& fam) -> std::string {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, Power>) {
          return "power:s=" + num(fam.s);
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          std::string out = "poly:";
          for (std::size_t i = 0; i < fam.coeffs.size(); ++i) out += (i ? "," : "") + num(fam.coeffs[i]);
          return out;
        } else {
          if (fam.terms.size() == 1) return "scale:" + num(fam.terms[0].weight) + "(" + fam.terms[0].fn->spec() + ")";
          std::string out = "sum(";
          for (std::size_t i = 0; i < fam.terms.size(); ++i) {
            const Term& t = fam.terms[i];
            out += i ? "," : "";
            out += t.weight == 1.0 ? t.fn->spec() : "scale:" + num(t.weight) + "(" + t.fn->spec() + ")";
          }
          return out + ")";
        }
      },
      family_);
}

ScalarFunction combine(Combine op, const ScalarFunction& f, const ScalarFunction* g, double lambda) {
  auto share = [](const ScalarFunction& x) { return std::make_shared<const ScalarFunction>(x); };
  if (op == Combine::sum) {
    if (g == nullptr) throw UsageError("sum needs two functions");
    return ScalarFunction::affine_combo({{1.0, share(f)}, {1.0, share(*g)}});
  }
  if (!(lambda > 0.0)) throw UsageError("scale factor must be positive, got " + num(lambda));
  return ScalarFunction::affine_combo({{lambda, share(f)}});
}

ScalarFunction parse_function(std::string_view text, const Interval& domain) {
  text = trim(text);
  if (text.starts_with("power:")) return ScalarFunction::power(parse_power_exponent(text), domain);
  if (text.starts_with("poly:")) {
    std::vector<double> coeffs;
    for (std::string_view c : split_top_level(text.substr(5))) coeffs.push_back(parse_number(c, text));
    return ScalarFunction::polynomial(std::move(coeffs), domain);
  }
  if (text.starts_with("sum(") && text.ends_with(")")) {
    std::vector<ScalarFunction::Term> terms;
    for (std::string_view part : split_top_level(text.substr(4, text.size() - 5))) {
      terms.push_back({1.0, std::make_shared<const ScalarFunction>(parse_function(part, domain))});
    }
    if (terms.size() < 2) throw UsageError("sum(...) needs at least two terms: '" + std::string(text) + "'");
    return ScalarFunction::affine_combo(std::move(terms));
  }
  if (text.starts_with("scale:")) {
    const auto open = text.find('(');
    if (open == std::string_view::npos || !text.ends_with(")")) {
      throw UsageError("expected scale:<lambda>(<function>), got '" + std::string(text) + "'");
    }
    const double lambda = parse_number(text.substr(6, open - 6), text);
    const ScalarFunction inner = parse_function(text.substr(open + 1, text.size() - open - 2), domain);
    return combine(Combine::scale, inner, nullptr, lambda);
  }
  throw UsageError("unknown function family '" + std::string(text) + "'");
}

WeightFunction::WeightFunction(Family family, double s) : WeightFunction(family, s, default_domain(family)) {}

WeightFunction::WeightFunction(Family family, double s, Interval domain)
    : family_(family), s_(s), domain_(domain) {
  domain_.validate();
  if (family_ == Family::power && !(s_ > 0.0 && std::isfinite(s_))) {
    throw UsageError("weight power exponent must be positive, got " + num(s_));
  }
  if (family_ == Family::reciprocal && domain_.lo == 0.0 && domain_.closed_lo) {
    throw UsageError("reciprocal weight is undefined at 0; use a domain open at 0");
  }
}

Interval WeightFunction::default_domain(Family family) {
  return family == Family::reciprocal ? Interval::left_open(0.0, 1.0) : Interval::closed(0.0, 1.0);
}

double WeightFunction::eval_unchecked(double x) const {
  switch (family_) {
    case Family::identity: return x;
    case Family::power: return std::pow(x, s_);
    case Family::constant_one: return 1.0;
    case Family::reciprocal: return 1.0 / x;
    case Family::cubic: return x * x * x - x * x + x;
    case Family::half_cubic: return (x * x * x - x * x + x) / 2.0;
  }
  return 0.0;
}

double WeightFunction::operator()(double x) const {
  if (!domain_.contains(x)) {
    throw NumericalError(ErrorKind::domain, "h = " + spec() + " evaluated at " + num(x) + " outside " +
                                                domain_.to_string());
  }
  return eval_unchecked(x);
}

std::string WeightFunction::spec() const {
  switch (family_) {
    case Family::identity: return "identity";
    case Family::power: return "power:s=" + num(s_);
    case Family::constant_one: return "one";
    case Family::reciprocal: return "recip";
    case Family::cubic: return "cubic";
    case Family::half_cubic: return "half_cubic";
  }
  return "?";
}

WeightFunction parse_weight(std::string_view text) {
  text = trim(text);
  using F = WeightFunction::Family;
  if (text == "identity" || text == "id") return WeightFunction(F::identity);
  if (text == "one") return WeightFunction(F::constant_one);
  if (text == "recip") return WeightFunction(F::reciprocal);
  if (text == "cubic") return WeightFunction(F::cubic);
  if (text == "half_cubic") return WeightFunction(F::half_cubic);
  if (text.starts_with("power:")) return WeightFunction(F::power, parse_power_exponent(text));
  throw UsageError("unknown weight family '" + std::string(text) + "'");
}

WeightFunction parse_weight(std::string_view text, const Interval& domain) {
  const WeightFunction h = parse_weight(text);
  return WeightFunction(h.family(), h.exponent(), domain);
}

double supermultiplicative_discrepancy(const WeightFunction& h, double x, double y) {
  return h(x * y) - h(x) * h(y);
}

HypothesisReport check_supermultiplicative(const WeightFunction& h, const Interval& j, int n_grid,
                                           int n_random, std::uint64_t seed) {
  if (n_grid < 2 && n_random < 1) throw UsageError("super-multiplicativity scan needs samples");
  const Interval box = j.capped(1.0);
  HypothesisReport rep;
  rep.property = "super-multiplicative h";
  rep.min_discrepancy = std::numeric_limits<double>::infinity();

  auto visit = [&](double x, double y) {
    if (!j.contains(x) || !j.contains(y) || !j.contains(x * y)) {
      ++rep.samples_skipped;
      return;
    }
    const double d = supermultiplicative_discrepancy(h, x, y);
    ++rep.samples_used;
    if (d < rep.min_discrepancy) {
      rep.min_discrepancy = d;
      rep.arg_min = {x, y};
    }
  };

  // Grid nodes include a closed endpoint and step inward from an open one.
  std::vector<double> nodes;
  for (int i = 0; i < n_grid; ++i) {
    double x;
    if (box.closed_lo) {
      x = box.lo + (box.hi - box.lo) * i / std::max(1, n_grid - 1);
    } else {
      x = box.lo + (box.hi - box.lo) * (i + 1) / n_grid;
    }
    nodes.push_back(x);
  }
  for (double x : nodes)
    for (double y : nodes) visit(x, y);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(box.lo, box.hi);
  for (int i = 0; i < n_random; ++i) visit(u(rng), u(rng));

  if (rep.samples_used == 0) throw UsageError("no admissible samples for the super-multiplicativity scan");
  rep.holds = rep.min_discrepancy >= -kHypothesisSlack;
  return rep;
}

HypothesisReport check_half_condition(const WeightFunction& h, int n_grid) {
  if (n_grid < 1) throw UsageError("half-condition grid must be non-empty");
  HypothesisReport rep;
  rep.property = "2h(1/2) <= h(a)/a";
  rep.min_discrepancy = std::numeric_limits<double>::infinity();
  const double two_h_half = 2.0 * h(0.5);
  for (int k = 1; k <= n_grid; ++k) {
    const double a = static_cast<double>(k) / (n_grid + 1);
    const double d = h(a) / a - two_h_half;
    ++rep.samples_used;
    if (d < rep.min_discrepancy) {
      rep.min_discrepancy = d;
      rep.arg_min = {a};
    }
  }
  rep.holds = rep.min_discrepancy >= -kHypothesisSlack;
  return rep;
}

PowerClassification classify_power_function(double s, double p) {
  if (!(s >= 0.0) || !(p > 0.0)) throw UsageError("classify_power_function needs s >= 0 and p > 0");
  PowerClassification c;
  c.ratio = s / p;
  c.member = c.ratio >= 1.0 - kRatioTol && c.ratio <= 2.0 + kRatioTol;
  c.operator_monotone = s <= 1.0;
  c.operator_convex = s >= 1.0 && s <= 2.0;
  std::ostringstream os;
  os << "s/p = " << c.ratio;
  if (!c.member) {
    os << " outside [1,2]: t^(s/p) is not operator convex";
  } else if (c.operator_monotone) {
    os << " in [1,2]; t^s is also operator monotone (s in [0,1])";
  } else if (c.operator_convex) {
    os << " in [1,2]; t^s is also operator convex (s in [1,2])";
  } else {
    os << " in [1,2]; t^s is neither operator monotone nor operator convex";
  }
  c.reason = os.str();
  return c;
}

}  // namespace opgx
