#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "liewalk/errors.hpp"
#include "liewalk/submodular.hpp"

using namespace liewalk;

TEST_CASE("adjoint action preserves dimension and orthonormality") {
  const LieAlgebra sl3 = LieAlgebra::build(Family::SlReal, 3);
  Rng rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = 1 + static_cast<int>(rng.below(7));
    const Subspace V = Subspace::random(8, k, rng);
    const Mat g = sl3.random_group_element(rng);
    const Subspace gV = adjoint_act(sl3, g, V);
    CHECK(gV.dim() == k);
    CHECK((gV.frame().transpose() * gV.frame() - Mat::Identity(k, k)).norm() <
          1e-10);
  }
}

TEST_CASE("generic intersection dimension of random pairs is the codimension count") {
  // For subspaces in general position dim(gV cap W) = max(0, a + b - D),
  // and the sampled minimum realizes exactly that.
  const LieAlgebra sl2 = LieAlgebra::build(Family::SlReal, 2);
  Rng rng(2);
  for (int rep = 0; rep < 25; ++rep) {
    const int a = 1 + static_cast<int>(rng.below(2));
    const int b = 1 + static_cast<int>(rng.below(2));
    const Subspace V = Subspace::random(3, a, rng);
    const Subspace W = Subspace::random(3, b, rng);
    const int d = generic_intersection_dim(sl2, V, W, 6, 1000 + rep);
    CHECK(d == std::max(0, a + b - 3));
  }
}

TEST_CASE("submodular bound holds with exact integer arithmetic") {
  const LieAlgebra sl3 = LieAlgebra::build(Family::SlReal, 3);
  Rng rng(3);
  for (int rep = 0; rep < 30; ++rep) {
    const int a = 1 + static_cast<int>(rng.below(7));
    const int b = 1 + static_cast<int>(rng.below(7));
    const Subspace V = Subspace::random(8, a, rng);
    const Subspace W = Subspace::random(8, b, rng);
    const SubmodularCheck c = verify_submodular(sl3, V, W, 6, 2000 + rep);
    CHECK(c.holds);
    CHECK(c.rhs_num == static_cast<std::int64_t>(a) * b);
    CHECK(c.rhs_den == 8);
    // Exact comparison: lhs * den <= num.
    CHECK(static_cast<std::int64_t>(c.lhs) * c.rhs_den <= c.rhs_num);
  }
}

TEST_CASE("threads do not change the sampled minimum") {
  const LieAlgebra sl3 = LieAlgebra::build(Family::SlReal, 3);
  Rng rng(4);
  const Subspace V = Subspace::random(8, 5, rng);
  const Subspace W = Subspace::random(8, 4, rng);
  const int serial = generic_intersection_dim(sl3, V, W, 12, 77, 1);
  const int parallel = generic_intersection_dim(sl3, V, W, 12, 77, 4);
  CHECK(serial == parallel);
}

TEST_CASE("upper borel pair: nonzero generic intersection, bound still holds") {
  const LieAlgebra sl3 = LieAlgebra::build(Family::SlReal, 3);
  const Subspace borel = sl3_upper_borel(sl3);
  const Subspace companion = sl3_companion_space(sl3);
  CHECK(borel.dim() == 5);
  CHECK(companion.dim() == 3);

  // Random translates never miss the companion space...
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat g = sl3.random_group_element(rng);
    CHECK(intersect_dim(adjoint_act(sl3, g, borel), companion) >= 1);
  }
  // ...the generic intersection is exactly one-dimensional...
  CHECK(generic_intersection_dim(sl3, borel, companion, 24, 505) == 1);
  // ...and the submodular bound 1 <= 5*3/8 is comfortably satisfied.
  const SubmodularCheck c = verify_submodular(sl3, borel, companion, 24, 505);
  CHECK(c.holds);
  CHECK(c.lhs == 1);
}

TEST_CASE("supermodularity on a nested triple") {
  const LieAlgebra sl2 = LieAlgebra::build(Family::SlReal, 2);
  Rng rng(6);
  for (int rep = 0; rep < 10; ++rep) {
    const Subspace V1 = Subspace::random(3, 2, rng);
    const Subspace V2 = Subspace::random(3, 2, rng);
    const Subspace W = Subspace::random(3, 2, rng);
    CHECK(supermodularity_check(sl2, V1, V2, W, 8, 3000 + rep));
  }
}

TEST_CASE("tensor equality laboratory") {
  // d1 = d2 = 2 with lines on both sides: intersections are complex lines
  // (real dimension 2), dims are exact and the splitting holds.
  const TensorEqualityReport r1 = equality_case_tensor(2, 2, 1, 1, 12, 42);
  CHECK(r1.expected_intersection_dim == 2);
  CHECK(r1.dims_exact);
  CHECK(r1.splitting_holds);
  CHECK(r1.complex_structure_ok);

  const TensorEqualityReport r2 = equality_case_tensor(2, 3, 1, 2, 8, 43);
  CHECK(r2.expected_intersection_dim == 4);
  CHECK(r2.dims_exact);
  CHECK(r2.splitting_holds);
  CHECK(r2.complex_structure_ok);
}

TEST_CASE("degenerate inputs are rejected") {
  const LieAlgebra sl2 = LieAlgebra::build(Family::SlReal, 2);
  Rng rng(7);
  const Subspace V = Subspace::random(3, 1, rng);
  const Subspace wrong_ambient = Subspace::random(4, 1, rng);
  CHECK_THROWS_AS(
      generic_intersection_dim(sl2, V, wrong_ambient, 4, 1),
      AmbientMismatch);
}
