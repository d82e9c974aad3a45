#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "liewalk/errors.hpp"
#include "liewalk/multislicing.hpp"
#include "liewalk/rng.hpp"
#include "liewalk/util.hpp"

using namespace liewalk;

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

// Exact upper tail P[Bin(J, p) >= ceil(t J)] in rational arithmetic, using
// the same forgiving ceiling as the bound under test.
Rational exact_binomial_tail(const Rational& p, double t, int J) {
  const long k0 = robust_ceil(t * J);
  const Rational q = 1 - p;
  Rational tail = 0;
  for (long k = k0; k <= J; ++k) {
    Rational term = Rational(binomial(J, static_cast<int>(k)));
    for (long i = 0; i < k; ++i) term *= p;
    for (long i = k; i < J; ++i) term *= q;
    tail += term;
  }
  return tail;
}

PointCloud grid_cloud_2d(int per_side) {
  std::vector<Vec> pts;
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j) {
      Vec p(2);
      p << (i + 0.5) / per_side, (j + 0.5) / per_side;
      pts.push_back(p);
    }
  return PointCloud::create(2, std::move(pts), 0.0);
}

}  // namespace

TEST_CASE("pixelize dyadic levels") {
  CHECK(pixelize(1.0) == 0);
  CHECK(pixelize(0.6) == 0);
  CHECK(pixelize(0.5) == 1);
  CHECK(pixelize(0.3) == 1);
  CHECK(pixelize(0.25) == 2);
  CHECK(pixelize(std::ldexp(1.0, -40)) == 40);
  CHECK_THROWS_AS(pixelize(0.0), InvalidEta);
  CHECK_THROWS_AS(pixelize(-0.5), InvalidEta);
  CHECK_THROWS_AS(pixelize(1.5), InvalidEta);
  CHECK_THROWS_AS(pixelize(std::ldexp(1.0, -41)), InvalidEta);
}

TEST_CASE("point cloud construction guards") {
  Vec in_range(2), out_of_range(2);
  in_range << 0.5, 0.0;
  out_of_range << 0.5, 1.0;
  CHECK_THROWS_AS(PointCloud::create(2, {out_of_range}), ConfigError);
  CHECK_THROWS_AS(PointCloud::create(0, {}), ConfigError);

  // Declared separation is verified.
  Vec a(1), b(1);
  a << 0.25;
  b << 0.5;
  CHECK_THROWS_AS(PointCloud::create(1, {a, b}, 0.3), InvariantViolation);
  const PointCloud ok = PointCloud::create(1, {a, b}, 0.25);
  CHECK(ok.size() == 2);
}

TEST_CASE("point cloud CSV round trip is exact") {
  Rng rng(3);
  std::vector<Vec> pts;
  for (int i = 0; i < 37; ++i) {
    Vec p(3);
    for (int c = 0; c < 3; ++c) p(c) = rng.uniform01();
    pts.push_back(p);
  }
  const PointCloud cloud = PointCloud::create(3, std::move(pts), 0.0);
  const std::string path = "roundtrip_cloud.csv";
  save_point_cloud(cloud, path);
  const PointCloud back = load_point_cloud(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == cloud.size());
  CHECK(back.dim == 3);
  for (int i = 0; i < cloud.size(); ++i)
    CHECK((back.points[i] - cloud.points[i]).norm() == 0.0);
}

TEST_CASE("cell keys and cell counts") {
  Vec x(2);
  x << 0.3, 0.8;
  CHECK(cell_key(x, 0) == CellKey{0, 0});
  CHECK(cell_key(x, 2) == CellKey{1, 3});
  const PointCloud g = grid_cloud_2d(4);
  CHECK(covering_number(g, 0.25) == 16);
  CHECK(covering_number(g, 0.5) == 4);
  CHECK(covering_number(g, 1.0) == 1);
  // Clamps oversize radii.
  CHECK(covering_number(g, 7.0) == 1);
}

TEST_CASE("box counting with flag exponents") {
  // 16 x 16 grid; x-block tiles at width delta^{1/2} = 1/4, y-block tiles at
  // width delta = 1/16: 4 * 16 = 64 tiles.
  const PointCloud g = grid_cloud_2d(16);
  Mat e1(2, 1);
  e1 << 1.0, 0.0;
  Flag flag;
  flag.spaces = {Subspace::span_of(e1),
                 Subspace::from_frame(Mat::Identity(2, 2))};
  CHECK(covering_number_box(g, flag, {0.5, 1.0}, 1.0 / 16.0) == 4 * 16);
  // Single-jump flag with r = 1 degenerates to the plain covering number.
  Flag trivial;
  trivial.spaces = {Subspace::from_frame(Mat::Identity(2, 2))};
  CHECK(covering_number_box(g, trivial, {1.0}, 1.0 / 16.0) ==
        covering_number(g, 1.0 / 16.0));
  CHECK_THROWS_AS(covering_number_box(g, flag, {0.5, 2.0}, 1.0 / 16.0),
                  BadExponents);
}

TEST_CASE("regularize: an exactly uniform tree is a single piece") {
  // One point per level-4 cell in 1D: branching is uniform (2, then 4) across
  // levels {1, 2, 4}, so the whole cloud comes back as one regular piece.
  std::vector<Vec> pts;
  for (int i = 0; i < 16; ++i) {
    Vec p(1);
    p << (i + 0.5) / 16.0;
    pts.push_back(p);
  }
  const PointCloud cloud = PointCloud::create(1, std::move(pts), 0.0);
  const RegularizeResult res = regularize(cloud, {1, 2, 4}, 0.5);
  REQUIRE(res.pieces.size() == 1);
  CHECK(res.bad.empty());
  CHECK(res.pieces[0].size() == 16);
  CHECK(piece_is_regular(res.pieces[0], {1, 2, 4}));
  CHECK(piece_mass_balanced(res.pieces[0], 4));
}

TEST_CASE("regularize: a doubled cell is carved away from the uniform part") {
  // The 8x8 grid carries one point per level-3 cell; an extra point lands in
  // the first cell.  The doubled cell sits in its own mass bin whose total
  // mass (2/65) is below the discard threshold, so it ends up in `bad` and
  // the remaining 63 singleton cells regroup into regular pieces.
  std::vector<Vec> pts;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      Vec p(2);
      p << (i + 0.5) / 8.0, (j + 0.5) / 8.0;
      pts.push_back(p);
    }
  Vec extra(2);
  extra << 0.01, 0.01;
  pts.push_back(extra);
  const PointCloud cloud = PointCloud::create(2, std::move(pts), 0.0);
  const RegularizeResult res = regularize(cloud, {1, 3}, 0.5);

  std::int64_t covered = res.bad.size();
  for (const PointCloud& piece : res.pieces) {
    CHECK(piece_is_regular(piece, {1, 3}));
    CHECK(piece_mass_balanced(piece, 3));
    covered += piece.size();
  }
  CHECK(covered == cloud.size());
  // Bad mass within the documented budget delta^eps / 2.
  const double delta_eps = std::pow(std::ldexp(1.0, -3), 0.5);
  CHECK(static_cast<double>(res.bad.size()) <=
        0.5 * delta_eps * static_cast<double>(cloud.size()) + 1e-9);
  // The doubled cell was indeed removed from every piece.
  for (const PointCloud& piece : res.pieces)
    for (const Vec& p : piece.points)
      CHECK(!(p(0) < 0.125 && p(1) < 0.125));
}

TEST_CASE("regularize input guards") {
  const PointCloud g = grid_cloud_2d(2);
  CHECK_THROWS_AS(regularize(g, {3, 2}, 0.5), LevelMismatch);
  CHECK_THROWS_AS(regularize(g, {}, 0.5), LevelMismatch);
  CHECK_THROWS_AS(regularize(g, {1, 50}, 0.5), LevelMismatch);
  CHECK_THROWS_AS(regularize(g, {1, 2}, 0.0), ConfigError);
}

TEST_CASE("regularize: random clouds always yield certified pieces") {
  Rng rng(9);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Vec> pts;
    const int n = 200 + static_cast<int>(rng.below(200));
    for (int i = 0; i < n; ++i) {
      Vec p(2);
      // Mix of uniform mass and a concentrated clump.
      if (rng.uniform01() < 0.3) {
        p << 0.4 + 0.01 * rng.uniform01(), 0.7 + 0.01 * rng.uniform01();
      } else {
        p << rng.uniform01(), rng.uniform01();
      }
      pts.push_back(p);
    }
    const PointCloud cloud = PointCloud::create(2, std::move(pts), 0.0);
    const RegularizeResult res = regularize(cloud, {2, 4, 7}, 0.4);
    std::int64_t covered = res.bad.size();
    for (const PointCloud& piece : res.pieces) {
      CHECK(piece_is_regular(piece, {2, 4, 7}));
      CHECK(piece_mass_balanced(piece, 7));
      covered += piece.size();
    }
    CHECK(covered == cloud.size());
  }
}

TEST_CASE("robust decomposition moves heavy atoms into the remainder") {
  std::vector<Vec> pts;
  for (double x : {0.1, 0.5, 0.9}) {
    Vec p(1);
    p << x;
    pts.push_back(p);
  }
  const PointCloud cloud = PointCloud::create(1, std::move(pts), 0.3);
  const std::vector<std::int64_t> masses = {8, 1, 1};
  // Ball of radius 0.05 around each point: leb = 2 * 0.05 = 0.1; with
  // alpha = 1 and mass scale 10 the allowance per ball is 1 point of mass.
  const RobustWitness w = robust_decompose(cloud, masses, 1.0, {0.05}, 0.9);
  CHECK(verify_robust_witness(cloud, masses, w));
  REQUIRE(w.nu2_indices.size() == 1);
  CHECK(w.nu2_indices[0] == 0);  // the mass-8 atom had to leave
  CHECK(w.nu1_indices == std::vector<int>{1, 2});

  // A tau too small to absorb the heavy atom is reported, not fudged.
  CHECK_THROWS_AS(robust_decompose(cloud, masses, 1.0, {0.05}, 0.5),
                  Infeasible);
}

TEST_CASE("robust witness verification is independent of the decomposition") {
  Rng rng(13);
  std::vector<Vec> pts;
  std::vector<std::int64_t> masses;
  for (int i = 0; i < 60; ++i) {
    Vec p(2);
    p << rng.uniform01(), rng.uniform01();
    pts.push_back(p);
    masses.push_back(1 + static_cast<std::int64_t>(rng.below(5)));
  }
  const PointCloud cloud = PointCloud::create(2, std::move(pts), 0.0);
  const RobustWitness w = robust_decompose(cloud, masses, 0.8, {0.1, 0.3}, 0.8);
  CHECK(verify_robust_witness(cloud, masses, w));

  // Forged witnesses are rejected: an alpha too strict for any occupied ball,
  // and a remainder that overshoots its declared tau.
  RobustWitness strict;
  strict.alpha = 5.0;
  strict.tau = 1.0;
  strict.radii = {0.1};
  for (int i = 0; i < 60; ++i) strict.nu1_indices.push_back(i);
  CHECK(!verify_robust_witness(cloud, masses, strict));

  RobustWitness dumped;
  dumped.alpha = 0.8;
  dumped.tau = 0.0;
  dumped.radii = {0.1};
  for (int i = 0; i < 60; ++i) dumped.nu2_indices.push_back(i);
  CHECK(!verify_robust_witness(cloud, masses, dumped));
}

TEST_CASE("chernoff bound dominates the exact binomial tail") {
  // Frozen spot value: p = 0.1, t = 0.5, J = 10.
  const double b1 = chernoff_bound(0.1, 0.5, 10);
  const Rational tail1 = exact_binomial_tail(Rational(1, 10), 0.5, 10);
  CHECK(b1 >= static_cast<double>(tail1));
  CHECK(b1 < 1.0);

  // Exponential decay of the J-th root toward p^t e.
  const double b50 = chernoff_bound(0.1, 0.5, 50);
  CHECK(std::pow(b50, 1.0 / 50.0) <=
        std::exp(1.0) * std::pow(0.1, 0.5) + 1e-12);

  // Dense sweep with exact-arithmetic tails.
  for (int pi = 1; pi <= 9; ++pi)
    for (int ti = pi + 1; ti <= 9; ++ti)
      for (int J : {1, 2, 3, 5, 8, 13, 20}) {
        const Rational p(pi, 10);
        const double bound =
            chernoff_bound(pi / 10.0, ti / 10.0, J);
        const Rational tail = exact_binomial_tail(p, ti / 10.0, J);
        CHECK(bound + 1e-15 >= static_cast<double>(tail));
      }

  // Trivial regime and guards.
  CHECK(chernoff_bound(0.5, 0.3, 10) == 1.0);
  CHECK(chernoff_bound(0.5, 0.5, 10) == 1.0);
  CHECK_THROWS_AS(chernoff_bound(0.0, 0.5, 10), ConfigError);
  CHECK_THROWS_AS(chernoff_bound(0.5, 1.0, 10), ConfigError);
  CHECK_THROWS_AS(chernoff_bound(0.5, 0.7, 0), ConfigError);
}

TEST_CASE("visual inequality on an axis-aligned grid") {
  const PointCloud g = grid_cloud_2d(16);
  Mat e1(2, 1), e2(2, 1);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  const std::vector<Subspace> L = {Subspace::span_of(e1),
                                   Subspace::span_of(e2)};
  const std::vector<double> q = {1.0, 1.0};
  const VisualCheck v =
      visual_inequality_check(g, L, q, 1.0 / 16.0, 0.5, 0.5, 8, 17);
  CHECK(v.holds);
  CHECK(v.lhs == doctest::Approx(256.0));
  CHECK(v.rhs >= v.lhs);
  CHECK(v.constant > 1.0);

  // A degenerate family (both projections equal) is rejected as
  // non-perceptive rather than silently checked.
  const std::vector<Subspace> bad = {Subspace::span_of(e1),
                                     Subspace::span_of(e1)};
  CHECK_THROWS_AS(
      visual_inequality_check(g, bad, q, 1.0 / 16.0, 0.5, 0.5, 8, 17),
      NotPerceptive);

  // Exponent bookkeeping is enforced.
  CHECK_THROWS_AS(
      visual_inequality_check(g, L, {1.0, 2.0}, 1.0 / 16.0, 0.5, 0.5, 8, 17),
      AmbientMismatch);
}

TEST_CASE("exceptional set estimate flags the collapsing direction") {
  // Sixteen points along a horizontal line: projecting onto the vertical
  // axis collapses everything into one tile, so span(e2) is exceptional in
  // BigO mode while span(e1) is not.
  std::vector<Vec> pts;
  for (int i = 0; i < 16; ++i) {
    Vec p(2);
    p << (i + 0.5) / 16.0, 0.5;
    pts.push_back(p);
  }
  const PointCloud line = PointCloud::create(2, std::move(pts), 0.0);
  Mat e1(2, 1), e2(2, 1);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  const std::vector<Subspace> dirs = {Subspace::span_of(e1),
                                      Subspace::span_of(e2)};
  // Budget of 4 fibers: the single line fiber under the vertical projection
  // holds all 16 cells at once, while the 16 singleton fibers under the
  // horizontal one cannot reach the delta^eps * N = 8 mass in 4 draws.
  const double frac = exceptional_set_estimate(line, dirs, 0.5, 0.25, 0.25,
                                               1.0 / 16.0, ExceptionalMode::BigO,
                                               4);
  CHECK(frac == doctest::Approx(0.5));

  // A full grid has no exceptional directions among the axes.
  const PointCloud g = grid_cloud_2d(16);
  const double none = exceptional_set_estimate(g, dirs, 0.5, 0.25, 0.25,
                                               1.0 / 16.0, ExceptionalMode::BigO,
                                               4);
  CHECK(none == doctest::Approx(0.0));
}
