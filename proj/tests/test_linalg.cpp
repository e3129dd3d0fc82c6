#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opgx/errors.hpp"
#include "opgx/scalar_functions.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace opgx;
using opgx::test::diag;
using opgx::test::max_abs_diff;
using opgx::test::random_hermitian;
using opgx::test::rel_diff;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an opgx::Error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("hermitian construction symmetrizes and rejects non-hermitian input") {
  CMatrix m(2, 2);
  m << Complex(1, 0), Complex(2, 1), Complex(2, -1), Complex(3, 0);
  m(0, 1) += Complex(1e-15, 0);
  const HermitianMatrix h(m);
  CHECK(h.matrix() == h.matrix().adjoint());
  CHECK(h.correction() > 0.0);
  CHECK(h.matrix()(0, 0).imag() == 0.0);

  CMatrix bad = m;
  bad(0, 1) = Complex(5, 0);
  CHECK(kind_of([&] { HermitianMatrix{bad}; }) == ErrorKind::usage);
  CHECK(kind_of([&] { HermitianMatrix{CMatrix(2, 3)}; }) == ErrorKind::usage);
}

TEST_CASE("spectral decomposition of the identity") {
  const SpectralDecomposition sd = spectral_decompose(HermitianMatrix::identity(3));
  CHECK(sd.eigenvalues.isApprox(RVector::Ones(3)));
  CHECK((sd.eigenvectors.adjoint() * sd.eigenvectors - CMatrix::Identity(3, 3)).norm() <= 1e-10 * 3);
}

TEST_CASE("spectral decomposition of a diagonal matrix sorts eigenvalues") {
  const SpectralDecomposition sd = spectral_decompose(diag({3, 1, 2}));
  CHECK(sd.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sd.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sd.eigenvalues(2) == doctest::Approx(3.0).epsilon(1e-15));
  // Permutation eigenvectors: every column has a single unit-modulus entry.
  for (int j = 0; j < 3; ++j) CHECK(sd.eigenvectors.col(j).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("apply_scalar_function on diagonal and scalar inputs") {
  const Interval k = Interval::closed(0, 10);
  const ScalarFunction sq = ScalarFunction::power(2, k);
  CHECK(max_abs_diff(apply_scalar_function(sq, diag({1, 2}), k).matrix(), diag({1, 4}).matrix()) < 1e-14);

  const ScalarFunction f = ScalarFunction::power(1.5, k);
  const HermitianMatrix ci = HermitianMatrix::identity(3) * 2.5;
  const HermitianMatrix expected = HermitianMatrix::identity(3) * std::pow(2.5, 1.5);
  CHECK(max_abs_diff(apply_scalar_function(f, ci, k).matrix(), expected.matrix()) < 1e-13);
}

TEST_CASE("apply_scalar_function composition t^0.75 twice equals t^1.5") {
  Rng rng(11);
  const Interval k = Interval::closed(0, 10);
  const ScalarFunction f = ScalarFunction::power(1.5, k);
  const ScalarFunction g = ScalarFunction::power(0.75, Interval::closed(0, 100));
  for (int t = 0; t < 50; ++t) {
    const HermitianMatrix a = random_psd_with_spectrum(4, k, rng);
    const HermitianMatrix ga = apply_scalar_function(g, a, Interval::closed(0, 100));
    const HermitianMatrix twice = HermitianMatrix(CMatrix(ga.matrix() * ga.matrix()));
    CHECK(rel_diff(twice, apply_scalar_function(f, a, k)) <= 1e-8);
  }
}

TEST_CASE("apply_scalar_function rejects spectra outside K and clamps within tolerance") {
  const Interval k = Interval::closed(0, 1);
  const ScalarFunction f = ScalarFunction::power(2, k);
  CHECK(kind_of([&] { apply_scalar_function(f, diag({0.5, 1.5}), k); }) == ErrorKind::spectrum);
  const HermitianMatrix edge = apply_scalar_function(f, diag({-1e-12, 1.0 + 1e-12}), k);
  CHECK(edge.matrix()(0, 0).real() == 0.0);
  CHECK(edge.matrix()(1, 1).real() == 1.0);
}

TEST_CASE("matrix_power examples and errors") {
  CHECK(max_abs_diff(matrix_power(diag({4, 9}), 0.5).matrix(), diag({2, 3}).matrix()) < 1e-15);
  for (double p : {-2.0, 0.3, 1.0, 7.0})
    CHECK(max_abs_diff(matrix_power(HermitianMatrix::identity(3), p).matrix(), CMatrix::Identity(3, 3)) < 1e-14);

  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const HermitianMatrix a = random_psd_with_spectrum(4, Interval::closed(0, 10), rng);
    CHECK(rel_diff(matrix_power(matrix_power(a, 3.0), 1.0 / 3.0), a) <= 1e-8);
  }
  CHECK(kind_of([] { matrix_power(diag({1, -1}), 0.5); }) == ErrorKind::not_psd);
  CHECK(kind_of([] { matrix_power(diag({1, 0}), -1.0); }) == ErrorKind::singular);
  CHECK(kind_of([] { matrix_power(diag({1, 2}), 0.0); }) == ErrorKind::usage);
  // Tiny negative roundoff is clamped to zero before the fractional power.
  CHECK(matrix_power(diag({-1e-12, 4}), 0.5).matrix()(0, 0).real() == 0.0);
}

TEST_CASE("matrix_log and matrix_exp examples") {
  CHECK(HermitianMatrix(matrix_log(HermitianMatrix::identity(3))).frobenius_norm() < 1e-15);
  CHECK(max_abs_diff(matrix_exp(diag({0, std::log(2.0)})).matrix(), diag({1, 2}).matrix()) < 1e-15);
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const HermitianMatrix a = random_psd_with_spectrum(4, Interval::closed(0.1, 10), rng);
    CHECK((matrix_exp(matrix_log(a)).matrix() - a.matrix()).norm() <= 1e-8 * a.spectral_norm());
  }
  CHECK(kind_of([] { matrix_log(diag({1, 0})); }) == ErrorKind::singular);
}

TEST_CASE("loewner_compare examples") {
  const HermitianMatrix x = diag({1.5, 2});
  const OrderVerdict same = loewner_compare(x, x);
  CHECK(same.gap == 0.0);
  CHECK(same.holds);

  const OrderVerdict v = loewner_compare(diag({1, 1}), diag({2, 3}));
  CHECK(v.gap == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v.holds);
  CHECK(v.scale == doctest::Approx(4.0));
  CHECK(v.band == doctest::Approx(1e-9 + 1e-8 * 4.0));

  const OrderVerdict w = loewner_compare(diag({2, 0}), diag({1, 1}));
  CHECK(w.gap == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_FALSE(w.holds);
  CHECK(w.certified_violation());

  CHECK(kind_of([] { loewner_compare(diag({1}), diag({1, 2})); }) == ErrorKind::usage);
}

TEST_CASE("loewner band hysteresis separates holds from certified violations") {
  const ToleranceConfig tol;
  const double band = tol.band(2.0);
  const OrderVerdict inside = loewner_compare(diag({1 + band / 2}), diag({1}));
  CHECK(inside.holds);
  const OrderVerdict between = loewner_compare(diag({1 + 5 * band}), diag({1}));
  CHECK_FALSE(between.holds);
  CHECK_FALSE(between.certified_violation());
  const OrderVerdict beyond = loewner_compare(diag({1 + 20 * band}), diag({1}));
  CHECK(beyond.certified_violation());
}

TEST_CASE("spectrum_in_interval examples") {
  CHECK(spectrum_in_interval(diag({0.5}), Interval::closed(0, 1)).inside);
  const SpectrumCheck out = spectrum_in_interval(diag({1 + 2e-9}), Interval::closed(0, 1));
  CHECK_FALSE(out.inside);
  REQUIRE(out.worst_offender);
  CHECK(*out.worst_offender == doctest::Approx(1 + 2e-9).epsilon(1e-15));
  Rng rng(3);
  const Interval k = Interval::closed(0.5, 2);
  for (int t = 0; t < 200; ++t) CHECK(spectrum_in_interval(random_psd_with_spectrum(3, k, rng), k).inside);
}

TEST_CASE("interval validation and membership") {
  CHECK_THROWS_AS(Interval::closed(-1, 1).validate(), UsageError);
  CHECK_THROWS_AS(Interval::closed(2, 1).validate(), UsageError);
  const Interval half_open = Interval::left_open(0, 1);
  CHECK_FALSE(half_open.contains(0.0));
  CHECK(half_open.contains(1.0));
  CHECK(Interval::closed(0, std::numeric_limits<double>::infinity()).capped(10).hi == 10.0);
  CHECK_THROWS_AS((ToleranceConfig{0.0, 1e-8}.validate()), UsageError);
}

// Randomized invariants: 10^4 cases across dimensions 1..6.
TEST_CASE("property: decomposition, covariance, power spectra and scalar order") {
  Rng rng(20240601);
  const Interval k = Interval::closed(0, 10);
  const ScalarFunction f = ScalarFunction::power(1.5, k);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  int cases = 0;
  for (int t = 0; t < 10000; ++t) {
    const int n = 1 + t % 6;
    const HermitianMatrix a = random_hermitian(n, rng);
    const SpectralDecomposition sd = spectral_decompose(a);
    REQUIRE((sd.reconstruct().matrix() - a.matrix()).norm() <= 1e-10 * n * a.frobenius_norm());
    REQUIRE((sd.eigenvectors.adjoint() * sd.eigenvectors - CMatrix::Identity(n, n)).norm() <= 1e-10 * n);
    for (int i = 1; i < n; ++i) REQUIRE(sd.eigenvalues(i - 1) <= sd.eigenvalues(i));

    const HermitianMatrix p = random_psd_with_spectrum(n, k, rng);
    const CMatrix u = random_unitary(n, rng);
    const HermitianMatrix conj = p.congruence(u.adjoint());
    const HermitianMatrix lhs = apply_scalar_function(f, conj, k);
    const HermitianMatrix rhs = apply_scalar_function(f, p, k).congruence(u.adjoint());
    REQUIRE((lhs.matrix() - rhs.matrix()).norm() <= 1e-9 * (1.0 + rhs.spectral_norm()));

    const RVector ev = p.eigenvalues();
    const RVector pev = matrix_power(p, 2.5).eigenvalues();
    for (int i = 0; i < n; ++i) {
      const double expected = std::pow(std::max(ev(i), 0.0), 2.5);
      REQUIRE(std::abs(pev(i) - expected) <= 1e-10 * std::max(1.0, expected));
    }

    const double x = unif(rng), y = unif(rng);
    const OrderVerdict s = loewner_compare(diag({x}), diag({y}));
    REQUIRE(s.gap == doctest::Approx(y - x).epsilon(1e-15));
    REQUIRE(s.holds == (y - x >= -s.band));
    ++cases;
  }
  CHECK(cases == 10000);
}

TEST_CASE("property: functional calculus on diagonal input is elementwise") {
  Rng rng(77);
  const Interval k = Interval::closed(0, 10);
  const ScalarFunction f = ScalarFunction::polynomial({0.5, 0.0, 2.0, 0.25}, k);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(5);
    for (double& x : v) x = unif(rng);
    const HermitianMatrix out = apply_scalar_function(f, HermitianMatrix::diagonal(v), k);
    for (int i = 0; i < 5; ++i) REQUIRE(std::abs(out.matrix()(i, i).real() - f(v[i])) <= 1e-14 * (1 + f(v[i])) * 10);
  }
}
