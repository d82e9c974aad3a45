#pragma once

#include <vector>

#include "liewalk/linalg.hpp"
#include "liewalk/rng.hpp"

namespace liewalk {

/// A linear subspace of R^D held as a D x k orthonormal frame.  k = 0 (the
/// zero subspace) is a valid value and every operation treats it correctly.
class Subspace {
 public:
  /// The zero subspace of R^D.
  explicit Subspace(int ambient_dim);

  /// Orthonormalizes the given spanning vectors (columns).
  static Subspace span_of(const Mat& vectors, double tol = kTol);

  /// Wraps an already orthonormal frame (validated).
  static Subspace from_frame(const Mat& frame, double tol = kTol);

  /// Random dim-dimensional subspace (Gaussian frame, orthonormalized).
  static Subspace random(int ambient_dim, int dim, Rng& rng);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(frame_.cols()); }
  const Mat& frame() const { return frame_; }

  Subspace orthogonal_complement(double tol = kTol) const;

  /// Orthogonal projection of a vector onto the subspace.
  Vec project(const Vec& x) const;

  /// Whether x lies in the subspace up to tol * |x|.
  bool contains(const Vec& x, double tol = kTol) const;

 private:
  int ambient_dim_;
  Mat frame_;  // ambient_dim_ x dim, orthonormal columns
};

/// Product of the sines of the principal angles between V and W
/// (the normalized wedge |v ^ w| / (|v| |w|)).  Conventions:
///   - 1 when the spaces are "fully transverse",
///   - 0 exactly when they intersect nontrivially (up to tolerance),
///   - 0 if either argument is zero-dimensional.
double angle(const Subspace& V, const Subspace& W);

/// Directed distance: the largest sine of a principal angle of V against W,
/// i.e. |(Id - proj_W) restricted to V| in operator norm.  dist_to({0}, W) = 0
/// and dist_to(V, {0}) = 1 for V != {0}.
double dist_to(const Subspace& V, const Subspace& W);

/// Symmetric distance on the Grassmannian: max of the two directed distances,
/// and 1 when dimensions differ.
double grass_dist(const Subspace& V, const Subspace& W);

/// dim(V cap W) = dim V + dim W - rank([F_V | F_W]).  When `decision` is
/// given, the underlying rank decision (with its spectral gap) is reported.
int intersect_dim(const Subspace& V, const Subspace& W, double tol = kTol,
                  RankDecision* decision = nullptr);

/// Actual intersection subspace (kernel method).
Subspace intersection(const Subspace& V, const Subspace& W, double tol = kTol);

/// Span of the union.
Subspace sum(const Subspace& V, const Subspace& W, double tol = kTol);

/// Samples a subspace at Grassmannian distance < rho from W: one frame
/// direction is rotated toward a random direction of the orthogonal
/// complement by an angle u ~ U(0, rho).  Returns W itself when W is {0} or
/// the whole space.
Subspace perturb_subspace(const Subspace& W, double rho, Rng& rng);

/// A complete flag of nested subspaces V_1 < V_2 < ... < V_{m+1} = R^D.
/// jumps()[i] = dim V_{i+1} - dim V_i are the dimension increments.
struct Flag {
  std::vector<Subspace> spaces;

  /// Validates nesting, strict dimension growth, and that the last space is
  /// the full ambient space.  Throws AmbientMismatch on violation.
  void validate(double tol = kTol) const;

  std::vector<int> jumps() const;

  /// Orthonormal frames of the successive increments V_i (-) V_{i-1}.
  std::vector<Mat> increment_frames(double tol = kTol) const;
};

/// Monte-Carlo membership test for the "pencil" of subspaces L that admit a
/// rho-perturbation W' of W with an abnormally small shadow: returns true if
/// any sampled W' in B_rho(W) (including W itself) satisfies
///   dim(pi_L W') < (dim L / D) * dim W,
/// where dim(pi_L W') = dim W' - dim(W' cap L_perp).
bool pencil_membership(const Subspace& L, const Subspace& W, double rho,
                       int trials, Rng& rng, double tol = kTol);

/// Membership of x in the box (sum of balls of radius delta^{r_i} in the i-th
/// flag increment) centered at `center`, tested block-by-block with slack
/// factor m+1 (the number of blocks):  |pi_{I_i}(x - center)| <= (m+1) *
/// delta^{r_i} for every increment I_i.  The exponents r must be strictly
/// increasing and lie in (0, 1]; delta must be in (0, 1).
bool box_membership(const Vec& x, const Vec& center, const Flag& flag,
                    const std::vector<double>& r, double delta);

}  // namespace liewalk
