#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "liewalk/errors.hpp"
#include "liewalk/experiments.hpp"
#include "liewalk/modular_surface.hpp"
#include "liewalk/rng.hpp"

using namespace liewalk;

namespace {

using cplx = std::complex<double>;

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

// Random determinant-1 matrix via rotation * diag * rotation.
Mat random_sl2(Rng& rng) {
  const double t = rng.uniform(-1.5, 1.5);
  const double u = rng.uniform(0.0, 2.0 * M_PI);
  const double v = rng.uniform(0.0, 2.0 * M_PI);
  const Mat rot_u = mat2(std::cos(u), -std::sin(u), std::sin(u), std::cos(u));
  const Mat rot_v = mat2(std::cos(v), -std::sin(v), std::sin(v), std::cos(v));
  return rot_u * mat2(std::exp(t), 0.0, 0.0, std::exp(-t)) * rot_v;
}

bool in_fundamental_domain(cplx z, double tol) {
  return std::abs(z.real()) <= 0.5 + tol && std::abs(z) >= 1.0 - tol &&
         z.imag() > 0.0;
}

bool integer_entries(const Mat& m) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (m(i, j) != std::nearbyint(m(i, j))) return false;
  return true;
}

}  // namespace

TEST_CASE("reduce maps the standard lattice to the corner point") {
  const LatticePoint id = reduce(Mat::Identity(2, 2));
  CHECK(id.z() == cplx(0.0, 1.0));
  CHECK(id.frame_angle == 0.0);

  // A unipotent column shift is already in the coset of the identity.
  const LatticePoint t = reduce(mat2(1.0, 1.0, 0.0, 1.0));
  CHECK(t.z() == cplx(0.0, 1.0));
  CHECK(t.rep == Mat::Identity(2, 2));

  // Sign canonicalization: -Id represents the same lattice.
  const LatticePoint neg = reduce(-Mat::Identity(2, 2));
  CHECK(neg.rep == Mat::Identity(2, 2));

  // A pure rotation cannot be reduced away: it survives in the frame angle.
  const double th = 0.3;
  const LatticePoint rot =
      reduce(mat2(std::cos(th), -std::sin(th), std::sin(th), std::cos(th)));
  CHECK(rot.z() == cplx(0.0, 1.0));
  CHECK(rot.frame_angle == doctest::Approx(th).epsilon(1e-12));
}

TEST_CASE("reduce rejects non-unimodular input") {
  CHECK_THROWS_AS(reduce(mat2(2.0, 0.0, 0.0, 1.0)), NotUnimodular);
  CHECK_THROWS_AS(reduce(mat2(0.0, 1.0, 1.0, 0.0)), NotUnimodular);  // det -1
  CHECK_THROWS_AS(reduce(Mat::Identity(3, 3)), NotUnimodular);
}

TEST_CASE("reduce is idempotent and lands in the fundamental domain") {
  Rng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    const Mat g = random_sl2(rng);
    const LatticePoint x = reduce(g);
    CHECK(in_fundamental_domain(x.z(), 1e-9));
    const LatticePoint again = reduce(x.rep);
    CHECK(again.rep == x.rep);  // bit-for-bit
  }
}

TEST_CASE("reduce is invariant under integer basis changes") {
  Rng rng(32);
  const Mat T = mat2(1.0, 1.0, 0.0, 1.0);
  const Mat S = mat2(0.0, -1.0, 1.0, 0.0);
  const Mat U = T * S * T * T;  // some fixed word in the modular group
  for (int rep = 0; rep < 100; ++rep) {
    const Mat g = random_sl2(rng);
    const LatticePoint a = reduce(g);
    const LatticePoint b = reduce(g * U);
    CHECK((a.rep - b.rep).norm() < 1e-6 * std::max(1.0, a.rep.norm()));
  }
}

TEST_CASE("integer cosets reduce to exactly integer representatives") {
  const WalkMeasure mu = default_modular_measure();
  Rng rng(33);
  Mat g = Mat::Identity(2, 2);
  for (int step = 0; step < 40; ++step) {
    g = mu.atoms[mu.sample_index(rng)] * g;
    const LatticePoint x = reduce(g);
    CHECK(integer_entries(x.rep));
    CHECK(x.rep(0, 0) * x.rep(1, 1) - x.rep(0, 1) * x.rep(1, 0) == 1.0);
    // Keep the running product itself reduced so entries stay small.
    g = x.rep;
  }
}

TEST_CASE("hyperbolic distance closed forms") {
  CHECK(hyperbolic_dist(cplx(0, 1), cplx(0, 2)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(hyperbolic_dist(cplx(0.3, 0.9), cplx(0.3, 0.9)) == 0.0);
  const cplx a(0.2, 1.3), b(-0.4, 2.1);
  CHECK(hyperbolic_dist(a, b) == hyperbolic_dist(b, a));
  CHECK(hyperbolic_dist(a, b) > 0.0);
}

TEST_CASE("injectivity proxy is the lattice systole") {
  const LatticePoint id = reduce(Mat::Identity(2, 2));
  CHECK(injectivity_proxy(id) == doctest::Approx(1.0).epsilon(1e-12));

  // A long thin lattice: the short basis vector is the systole.
  LatticePoint thin;
  thin.rep = mat2(10.0, 0.0, 0.0, 0.1);
  thin.frame_angle = 0.0;
  CHECK(injectivity_proxy(thin) == doctest::Approx(0.1).epsilon(1e-12));
  // Reduction does not change the lattice, so the systole is unchanged.
  CHECK(injectivity_proxy(reduce(thin.rep)) ==
        doctest::Approx(0.1).epsilon(1e-12));

  // No unimodular lattice beats the hexagonal one.
  const double minkowski = std::sqrt(2.0 / std::sqrt(3.0));
  Rng rng(34);
  for (int rep = 0; rep < 50; ++rep)
    CHECK(injectivity_proxy(reduce(random_sl2(rng))) <= minkowski + 1e-9);
}

TEST_CASE("invariant-measure sampler: domain, determinism, cusp moment") {
  const std::vector<LatticePoint> sample = haar_sample(20000, 2026);
  for (int i = 0; i < 100; ++i)
    CHECK(in_fundamental_domain(sample[i].z(), 1e-12));

  // Per-index seeding: prefixes agree across different counts.
  const std::vector<LatticePoint> prefix = haar_sample(5, 2026);
  for (int i = 0; i < 5; ++i) CHECK(prefix[i].rep == sample[i].rep);

  // E[1/y] = 3 log(3) / (2 pi) under the invariant measure.
  double mean = 0.0;
  for (const LatticePoint& x : sample) mean += 1.0 / x.z().imag();
  mean /= static_cast<double>(sample.size());
  CHECK(mean == doctest::Approx(3.0 * std::log(3.0) / (2.0 * M_PI)).epsilon(0.04));

  CHECK_THROWS_AS(haar_sample(0, 1), ConfigError);
}

TEST_CASE("unimodular measure validation") {
  CHECK_NOTHROW(validate_unimodular(default_modular_measure()));
  WalkMeasure empty;
  CHECK_THROWS_AS(validate_unimodular(empty), BadMeasure);

  WalkMeasure unbalanced = default_modular_measure();
  unbalanced.weights = {0.6, 0.3, 0.05, 0.05};
  CHECK_NOTHROW(validate_unimodular(unbalanced));
  unbalanced.weights = {0.5, 0.25, 0.25, 0.0};
  CHECK_NOTHROW(validate_unimodular(unbalanced));  // zero weight allowed
  unbalanced.weights = {0.6, 0.3, 0.05, 0.04};
  CHECK_THROWS_AS(validate_unimodular(unbalanced), BadMeasure);

  WalkMeasure nonint = default_modular_measure();
  nonint.atoms[0] = mat2(2.0, 0.0, 0.0, 1.0);
  CHECK_THROWS_AS(validate_unimodular(nonint), NotUnimodular);
}

TEST_CASE("walk distribution: determinism, thread invariance, trapping") {
  const WalkMeasure mu = default_modular_measure();
  const LatticePoint x0 = reduce(Mat::Identity(2, 2));

  const std::vector<LatticePoint> a = walk_distribution(mu, x0, 15, 400, 7, 1);
  const std::vector<LatticePoint> b = walk_distribution(mu, x0, 15, 400, 7, 3);
  REQUIRE(a.size() == 400);
  for (int i = 0; i < 400; ++i) CHECK(a[i].rep == b[i].rep);

  // Zero steps returns the start point.
  const std::vector<LatticePoint> still = walk_distribution(mu, x0, 0, 3, 7);
  for (const LatticePoint& x : still) CHECK(x.rep == x0.rep);

  // Integer orbits never leave the standard lattice: the shape parameter is
  // pinned to the corner exactly, at every step count.
  for (const LatticePoint& x : a) {
    CHECK(x.z() == cplx(0.0, 1.0));
    CHECK(injectivity_proxy(x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("walk distribution separates trapped from spread-out starts") {
  const WalkMeasure mu = default_modular_measure();
  const std::vector<LatticePoint> haar = haar_sample(6000, 99);

  const LatticePoint trapped_start = reduce(Mat::Identity(2, 2));
  const std::vector<LatticePoint> trapped =
      walk_distribution(mu, trapped_start, 15, 4000, 11, 2);
  const DiscrepancyReport far = discrepancy(trapped, haar, 0.5, 256, 5);
  CHECK(far.value >= 0.8);

  // A start with irrational coordinates equidistributes.
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const LatticePoint generic_start = reduce(mat2(1.0, phi, 0.0, 1.0));
  const std::vector<LatticePoint> generic =
      walk_distribution(mu, generic_start, 50, 6000, 11, 2);
  const DiscrepancyReport close = discrepancy(generic, haar, 0.5, 256, 5);
  CHECK(close.value <= 0.1);
  CHECK(inj_fraction_below(generic, 0.1) <= 0.02);
}

TEST_CASE("discrepancy is a symmetric pseudometric lower bound") {
  const std::vector<LatticePoint> a = haar_sample(3000, 1);
  const std::vector<LatticePoint> c = haar_sample(3000, 2);

  const DiscrepancyReport self = discrepancy(a, a, 0.5, 128, 9);
  CHECK(self.value == 0.0);
  CHECK(self.dictionary_size == 128);
  CHECK(self.n_samples == 3000);
  CHECK(self.beta == 0.5);

  const DiscrepancyReport ab = discrepancy(a, c, 0.5, 128, 9);
  const DiscrepancyReport ba = discrepancy(c, a, 0.5, 128, 9);
  CHECK(ab.value == ba.value);
  CHECK(ab.value >= 0.0);
  CHECK(ab.value <= 2.0);

  // Independent draws from the same law are close in the bounded-Holder
  // metric; this is the scale against which walk output is judged.
  const std::vector<LatticePoint> a2 = haar_sample(20000, 41);
  const std::vector<LatticePoint> c2 = haar_sample(20000, 42);
  CHECK(discrepancy(a2, c2, 1.0, 256, 9).value <= 0.05);

  // Frame-aware dictionaries stay within the same bound.
  CHECK(discrepancy(a2, c2, 1.0, 256, 9, true).value <= 0.05);

  CHECK_THROWS_AS(discrepancy({}, a, 0.5, 128, 9), EmptySample);
  CHECK_THROWS_AS(discrepancy(a, a, 0.0, 128, 9), ConfigError);
  CHECK_THROWS_AS(discrepancy(a, a, 1.5, 128, 9), ConfigError);
  CHECK_THROWS_AS(discrepancy(a, a, 0.5, 0, 9), ConfigError);
}

TEST_CASE("recurrence probe") {
  const std::vector<LatticePoint> sample = haar_sample(5000, 77);
  const double lo = inj_fraction_below(sample, 0.1);
  const double hi = inj_fraction_below(sample, 1.0);
  CHECK(lo <= hi);
  CHECK(lo >= 0.0);
  // Every unimodular systole sits below the hexagonal bound ~ 1.075.
  CHECK(inj_fraction_below(sample, 1.2) == 1.0);
  CHECK_THROWS_AS(inj_fraction_below({}, 0.5), EmptySample);
}
