#pragma once

#include <cstdint>
#include <vector>

#include "liewalk/lie_algebra.hpp"
#include "liewalk/linalg.hpp"

namespace liewalk {

/// The split complex orthogonal model so(q, C) on C^{2n} with
/// q(u, v) = u^T Q v, Q = (1/2) [[0, I], [I, 0]].  Basis matrices have
/// integer entries:
///   H_k     = E_{k,k} - E_{n+k,n+k}
///   Y_{k,l} = E_{k,l} - E_{n+l,n+k}          (k != l)
///   Z_{k,l} = E_{k,n+l} - E_{l,n+k}          (k < l)   and transposes.
/// v1_basis spans the weight-one space {Y_{1,l}, Z_{1,l} : l >= 2} of
/// dimension 2(n-1) = d - 1 for d = 2n - 1.
struct SOQModel {
  int n = 0;
  CMat form;                      // Q
  std::vector<CMat> so_basis;     // n(2n-1) matrices
  std::vector<CMat> v1_basis;     // 2(n-1) matrices

  static SOQModel build(int n);
  int ambient_dim() const { return 2 * n; }
};

/// Exact structural self-check on the integer basis: every basis matrix M
/// satisfies M^T (2Q) + (2Q) M = 0, the block identities A^T = -D,
/// B^T = -B, C^T = -C hold, and ad(H_1) fixes every v1 basis element with
/// eigenvalue exactly 1.  All comparisons are integer-exact.
bool exact_structure_check(const SOQModel& model);

/// The unique M in span(v1_basis) with 2 M e_{n+1} = w; its action is
/// M v = -q(w, v) e_1 + q(e_1, v) w.  Throws NotOrthogonal unless the
/// coordinates of w on e_1 and e_{n+1} vanish (relative tolerance 1e-12).
CMat m_w(const SOQModel& model, const CVec& w);

/// exp(X_1) exp(X_2) for two random algebra elements of Frobenius norm at
/// most 1; preserves the form to ~1e-12 and has determinant 1.
CMat random_so_group_element(const SOQModel& model, std::uint64_t seed);

/// Throws NotInGroup unless h^T Q h = Q within tol * max(1, |h|_F^2).
void require_so_q(const SOQModel& model, const CMat& h, double tol = kTol);

/// k(d-1) minus the rank of the stacked vectorized bases of the conjugated
/// spaces Ad(h_i) span(v1_basis), k = h.size().  Zero means the translates
/// are in direct sum.
int direct_sum_defect(const SOQModel& model, const std::vector<CMat>& h,
                      double tol = kTol);

/// Real positive control: same defect computation for translates of the
/// positive restricted-root space of a real algebra (dim 2 for so(3,1),
/// where generic triples are in direct sum).
int root_space_defect(const LieAlgebra& alg, const std::vector<Mat>& h,
                      double tol = kTol);

struct RelationResult {
  CMat lambda;              // 4x4 complex symmetric; the packed coefficient
                            // vector (upper triangle) has unit norm
  std::vector<CVec> w;      // w_a = h_a^{-1} sum_b lambda_{ab} h_b e_1
  double residual = 0.0;    // |sum_a Ad(h_a) M_{w_a}|_F
  int solution_dim = 0;     // dimension of the constraint null space
};

/// Solves the 8 linear constraints (for each a, the coordinates of
/// h_a^{-1} sum_b lambda_{ab} h_b e_1 on e_1 and e_{n+1} vanish) on the
/// 10-dimensional space of symmetric 4x4 matrices, returning the
/// smallest-singular-direction solution with a deterministic phase
/// convention.  The returned residual certifies the four-translate linear
/// relation sum_a Ad(h_a) M_{w_a} = 0.  Throws DegenerateConfiguration when
/// the h_a e_1 are dependent, the null space has dimension < 2, or every
/// w_a degenerates to zero (resample in all three cases).
RelationResult find_relation(const SOQModel& model,
                             const std::vector<CMat>& h, double tol = kTol);

}  // namespace liewalk
