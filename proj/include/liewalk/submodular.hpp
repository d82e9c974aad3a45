#pragma once

#include <cstdint>
#include <vector>

#include "liewalk/grassmann.hpp"
#include "liewalk/lie_algebra.hpp"

namespace liewalk {

/// Ad(g) applied to a subspace of the algebra (orthonormal coordinates):
/// multiply the frame and re-orthonormalize.
Subspace adjoint_act(const LieAlgebra& alg, const Mat& g, const Subspace& V);

/// min over sampled g of dim(Ad(g) V cap W).  The minimum is attained on a
/// dense open set, so the sampled min equals the generic value deg_W(V) with
/// probability 1.  Rank decisions with spectral gap ratio below 10^3 are
/// retried with a fresh group sample.  Deterministic given seed; independent
/// of threads.
int generic_intersection_dim(const LieAlgebra& alg, const Subspace& V,
                             const Subspace& W, int samples,
                             std::uint64_t seed, int threads = 1);

struct SubmodularCheck {
  bool holds = false;
  int lhs = 0;           ///< generic intersection dimension
  std::int64_t rhs_num = 0;  ///< dim V * dim W
  std::int64_t rhs_den = 0;  ///< algebra_dim
};

/// Checks deg_W(V) <= dim V * dim W / dim g by exact cross-multiplication.
SubmodularCheck verify_submodular(const LieAlgebra& alg, const Subspace& V,
                                  const Subspace& W, int samples,
                                  std::uint64_t seed, int threads = 1);

/// deg_W(V1) + deg_W(V2) <= deg_W(V1 cap V2) + deg_W(V1 + V2).
bool supermodularity_check(const LieAlgebra& alg, const Subspace& V1,
                           const Subspace& V2, const Subspace& W, int samples,
                           std::uint64_t seed, int threads = 1);

/// The 5-dimensional upper-triangular traceless subalgebra of sl(3,R), in
/// orthonormal coordinates.
Subspace sl3_upper_borel(const LieAlgebra& sl3);

/// The 3-dimensional companion space span{diag(1,1,-2), E_31, E_32}: every
/// Ad(g) image of the Borel subalgebra meets it, yet the submodular bound
/// still holds.
Subspace sl3_companion_space(const LieAlgebra& sl3);

/// Equality-case laboratory on H = C^{d1} (x) C^{d2} with G = SL(d1) x SL(d2)
/// acting by g1 (x) g2, realified to real linear algebra.  V = H_1 (x) E_2
/// and W = E_1 (x) H_2 for seeded random complex subspaces E_i.
struct TensorEqualityReport {
  int samples = 0;
  int expected_intersection_dim = 0;  ///< real dimension 2 * e1 * e2
  bool dims_exact = false;       ///< dim(gV cap W) equals the expectation always
  bool splitting_holds = false;  ///< gV = (gV cap W') (+) (gV cap W'')
  bool complex_structure_ok = false;  ///< J-invariance of V, W, gV
};

TensorEqualityReport equality_case_tensor(int d1, int d2, int e1, int e2,
                                          int samples, std::uint64_t seed);

}  // namespace liewalk
