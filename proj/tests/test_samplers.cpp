#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opgx/errors.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace opgx;
using opgx::test::max_abs_diff;

namespace {

double unitarity_residual(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

}  // namespace

TEST_CASE("seed derivation is a pure function of master seed and trial") {
  const SeedSpec a{42, 7}, b{42, 7}, c{42, 8}, d{43, 7};
  CHECK(a.derived() == b.derived());
  CHECK(a.derived() != c.derived());
  CHECK(a.derived() != d.derived());
  Rng r1 = a.engine(), r2 = b.engine();
  CHECK(random_unitary(4, r1) == random_unitary(4, r2));
}

TEST_CASE("random unitary examples") {
  Rng rng(1);
  const CMatrix u1 = random_unitary(1, rng);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) < 1e-15);
  for (int n = 1; n <= 6; ++n) {
    const CMatrix u = random_unitary(n, rng);
    CHECK(unitarity_residual(u) <= 1e-12 * n);
    for (int j = 0; j < n; ++j) CHECK(std::abs(u.col(j).norm() - 1.0) <= 1e-13);
  }
}

TEST_CASE("random psd with spectrum examples") {
  Rng rng(2);
  const HermitianMatrix one = random_psd_with_spectrum(3, Interval::closed(1, 1), rng);
  CHECK(one.matrix() == CMatrix::Identity(3, 3));
  const HermitianMatrix s = random_psd_with_spectrum(1, Interval::closed(0, 1), rng);
  CHECK(s.matrix()(0, 0).real() >= 0.0);
  CHECK(s.matrix()(0, 0).real() <= 1.0);

  const Interval k = Interval::closed(0.5, 3);
  double lo = 1e9, hi = -1e9;
  for (int t = 0; t < 10000; ++t) {
    const RVector ev = random_psd_with_spectrum(4, k, rng).eigenvalues();
    lo = std::min(lo, ev.minCoeff());
    hi = std::max(hi, ev.maxCoeff());
  }
  CHECK(lo >= 0.5 - 1e-12);
  CHECK(hi <= 3 + 1e-12);

  // Unbounded K is capped at lo + 10.
  const RVector ev = random_psd_with_spectrum(5, Interval::closed(2, std::numeric_limits<double>::infinity()), rng)
                         .eigenvalues();
  CHECK(ev.maxCoeff() <= 12 + 1e-12);
}

TEST_CASE("random contraction examples") {
  Rng rng(3);
  for (int n = 1; n <= 5; ++n) {
    for (int t = 0; t < 50; ++t) CHECK(spectral_norm(random_contraction(n, rng)) <= 1 + 1e-12);
    const CMatrix iso = random_contraction(n, rng, true);
    CHECK(unitarity_residual(iso) <= 1e-12 * n);
    CHECK(spectral_norm(iso) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(std::abs(random_contraction(1, rng)(0, 0)) <= 1.0);
  CHECK_THROWS_AS(contraction_from_gaussian(CMatrix::Ones(2, 2), 0.5), UsageError);
}

TEST_CASE("unitary dilation examples") {
  const int n = 3;
  const CMatrix zero = CMatrix::Zero(n, n);
  CMatrix expected(2 * n, 2 * n);
  expected << zero, CMatrix::Identity(n, n), CMatrix::Identity(n, n), zero;
  CHECK(max_abs_diff(unitary_dilation(zero), expected) < 1e-15);

  Rng rng(4);
  const CMatrix u = random_unitary(n, rng);
  const CMatrix w = unitary_dilation(u);
  CHECK(w.topLeftCorner(n, n) == u);
  CHECK(w.topRightCorner(n, n).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(w.bottomLeftCorner(n, n).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_abs_diff(w.bottomRightCorner(n, n), -u.adjoint()) < 1e-15);

  for (int t = 0; t < 100; ++t) {
    const CMatrix v = random_contraction(n, rng);
    const CMatrix d = unitary_dilation(v);
    CHECK(d.topLeftCorner(n, n) == v);
    CHECK(unitarity_residual(d) <= 1e-10 * n);
  }
  CHECK_THROWS_AS(unitary_dilation(CMatrix::Identity(2, 2) * 1.1), UsageError);
}

TEST_CASE("co-isometry pairs") {
  Rng rng(5);
  for (int n = 1; n <= 5; ++n) {
    for (int t = 0; t < 20; ++t) {
      const ContractionPair pair = random_coisometry_pair(n, rng);
      const CMatrix s = pair.c() * pair.c().adjoint() + pair.d() * pair.d().adjoint();
      CHECK((s - CMatrix::Identity(n, n)).norm() <= 1e-12 * n);
    }
  }
  CHECK_NOTHROW(ContractionPair(CMatrix::Identity(3, 3), CMatrix::Zero(3, 3)));
  const double th = 0.7;
  CHECK_NOTHROW(ContractionPair(std::cos(th) * CMatrix::Identity(3, 3), std::sin(th) * CMatrix::Identity(3, 3)));
  CHECK_THROWS_AS(ContractionPair(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)), HypothesisError);
}

TEST_CASE("random projections") {
  Rng rng(6);
  const int n = 4;
  CHECK(max_abs_diff(random_projection(n, n, rng).matrix(), CMatrix::Identity(n, n)) < 1e-12);
  CHECK(random_projection(n, 0, rng).matrix() == CMatrix::Zero(n, n));
  for (int r = 0; r <= n; ++r) {
    for (int t = 0; t < 20; ++t) {
      const HermitianMatrix q = random_projection(n, r, rng);
      CHECK((q.matrix() * q.matrix() - q.matrix()).norm() <= 1e-12 * n);
      CHECK(std::abs(q.matrix().trace().real() - r) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(random_projection(n, n + 1, rng), UsageError);
  CHECK_THROWS_AS(random_projection(n, -1, rng), UsageError);
}

TEST_CASE("resolutions of identity") {
  // B_1 = B_2 = I gives A_1 = A_2 = I for any weights.
  const CMatrix g = CMatrix::Identity(3, 3);
  const ResolutionOfIdentity trivial = resolution_from_gaussians({0.3, 0.7}, {g, g}, {1.0, 2.0});
  for (const HermitianMatrix& a : trivial.operators) CHECK(max_abs_diff(a.matrix(), CMatrix::Identity(3, 3)) < 1e-14);

  Rng rng(7);
  const Interval k = Interval::closed(0, 10);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 5;
    const ResolutionOfIdentity res = random_resolution(n, 2 + t % 4, k, rng);
    CHECK(res.residual() <= 1e-12 * n);
    double total = 0.0;
    for (double w : res.weights) {
      CHECK(w > 0.0);
      CHECK(w < 1.0);
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (const HermitianMatrix& a : res.operators) CHECK(a.min_eigenvalue() >= -1e-12);
    for (double x : res.points) CHECK(k.contains(x));
    CHECK_NOTHROW(res.validate(k));
  }
  CHECK_THROWS_AS(random_resolution(3, 1, k, rng), UsageError);
}

TEST_CASE("unital positive maps") {
  Rng rng(8);
  const UnitalPositiveMap single = random_unital_positive_map(3, 1, rng);
  CHECK(unitarity_residual(single.kraus().front()) <= 1e-12);

  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 4;
    const UnitalPositiveMap phi = random_unital_positive_map(n, 3, rng, t % 2 == 1);
    const HermitianMatrix id = phi(HermitianMatrix::identity(n));
    CHECK((id.matrix() - CMatrix::Identity(n, n)).norm() <= 1e-12);
    const HermitianMatrix x = random_psd_with_spectrum(n, Interval::closed(0, 5), rng);
    const HermitianMatrix y = phi(x);
    CHECK(y.min_eigenvalue() >= -1e-12 * (1 + y.spectral_norm()));
  }
  CHECK_THROWS_AS(UnitalPositiveMap({CMatrix::Identity(2, 2) * 2.0}), HypothesisError);
}
