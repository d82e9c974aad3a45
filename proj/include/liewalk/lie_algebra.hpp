#pragma once

#include <utility>
#include <vector>

#include "liewalk/grassmann.hpp"
#include "liewalk/linalg.hpp"
#include "liewalk/rng.hpp"

namespace liewalk {

enum class Family {
  SlReal,      ///< sl(d, R), param = d >= 2
  SoP1,        ///< so(p, 1), param = p >= 2 (form diag(1..1,-1))
  SoQComplex,  ///< so(q, C) for q(x) = sum x_l x_{n+l} on C^{2n}, param = n >= 2
};

/// One restricted root: its values on the Cartan basis, its multiplicity and
/// its root space (in orthonormal-basis coordinates of the algebra).
struct RestrictedRoot {
  Vec on_cartan_basis;  ///< alpha(H_b) for the stored Cartan basis
  int multiplicity = 0;
  Subspace space;

  RestrictedRoot() : space(1) {}
};

struct RootDecomposition {
  std::vector<RestrictedRoot> positive;  ///< ordered by value on the regular element, descending
  Subspace centralizer;                  ///< kernel of all ad(H), H in the Cartan subspace

  RootDecomposition() : centralizer(1) {}
};

/// A concrete matrix model of a simple Lie algebra from one of the supported
/// families, together with the bases and bilinear forms everything downstream
/// uses.  Real families carry a Killing-orthonormal basis so that subspace
/// geometry in coordinate space matches the invariant inner product
/// <X, Y> = -Kill(X, theta(Y)).
class LieAlgebra {
 public:
  static LieAlgebra build(Family family, int param, double tol = kTol);

  Family family() const { return family_; }
  int param() const { return param_; }
  /// Size of the matrices (2n for the complex family).
  int ambient_dim() const { return ambient_dim_; }
  /// Dimension of the algebra: real dimension for real families, complex
  /// dimension for the complex family.
  int algebra_dim() const { return algebra_dim_; }
  bool is_complex() const { return family_ == Family::SoQComplex; }
  double tol() const { return tol_; }

  /// Structural basis (real families): integer-entried matrices.
  const std::vector<Mat>& basis() const { return basis_; }
  /// Complex-family basis as (re, im) pairs of real matrices.
  const std::vector<std::pair<Mat, Mat>>& basis_complex() const { return basis_c_; }
  /// Killing-orthonormal basis (real families only).
  const std::vector<Mat>& on_basis() const { return on_basis_; }
  /// Gram matrix of the Killing form on the structural basis (real families).
  const Mat& killing_gram() const { return killing_gram_; }
  /// Indices into basis() forming the Cartan subspace basis (real families).
  const std::vector<int>& cartan_indices() const { return cartan_indices_; }
  std::vector<Mat> cartan_basis() const;
  int rank() const { return static_cast<int>(cartan_indices_.size()); }

  // -- Bilinear forms (real families) ---------------------------------------

  /// Killing form by its definition tr(ad X . ad Y).
  double killing(const Mat& X, const Mat& Y) const;
  /// The classical scaled-trace shortcut for this family (cross-check).
  double killing_matrix_trace(const Mat& X, const Mat& Y) const;
  /// Cartan involution theta (minus transpose for these models).
  Mat theta(const Mat& X) const;
  /// Positive-definite inner product -Kill(X, theta(Y)).
  double inner(const Mat& X, const Mat& Y) const;

  // -- Coordinates (real families) -------------------------------------------

  /// Coordinates of X in the orthonormal basis; throws NotInAlgebra when the
  /// residual exceeds tol * |X|.
  Vec coords(const Mat& X) const;
  Mat from_coords(const Vec& c) const;
  /// theta as a matrix acting on orthonormal coordinates.
  const Mat& theta_on_coords() const { return theta_coords_; }

  /// Matrix of ad(X): Y -> [X, Y] on orthonormal coordinates.
  Mat ad_matrix(const Mat& X) const;

  // -- Group-level -----------------------------------------------------------

  bool in_group(const Mat& g, double tol) const;
  void require_in_group(const Mat& g, double tol) const;
  /// Matrix of Ad(g): Y -> g Y g^{-1} on orthonormal coordinates.
  Mat adjoint_operator(const Mat& g) const;

  /// Gaussian element in orthonormal coordinates with norm clamped.
  Mat random_algebra_element(Rng& rng, double norm_clamp = 1.5) const;
  /// Product of `factors` exponentials of clamped Gaussian elements.
  Mat random_group_element(Rng& rng, int factors = 3, double norm_clamp = 1.5) const;

  // -- Restricted roots (SlReal, SoP1) ---------------------------------------

  /// Simultaneous diagonalization of ad over the Cartan subspace.  Verifies
  /// the bracket eigen-relations, the multiplicity count
  /// (sum of root-space dims + centralizer = algebra_dim), and that theta
  /// swaps g_alpha and g_{-alpha}.  Cached after the first call.
  const RootDecomposition& restricted_roots() const;

  /// The deterministic dominant regular element used to orient roots: for
  /// sl(d) the centered diagonal (2^{-1}, ..., 2^{-d}), whose strictly
  /// decreasing entries make alpha(H*) > 0 exactly for the lexicographically
  /// positive roots; for so(p, 1) the standard boost generator.
  Mat regular_cartan_element() const;

 private:
  LieAlgebra() = default;
  void build_sl(int d);
  void build_so_p1(int p);
  void build_so_q_complex(int n);
  void finish_real_family();

  Family family_ = Family::SlReal;
  int param_ = 0;
  int ambient_dim_ = 0;
  int algebra_dim_ = 0;
  double tol_ = kTol;

  std::vector<Mat> basis_;
  std::vector<std::pair<Mat, Mat>> basis_c_;
  std::vector<int> cartan_indices_;
  Mat killing_gram_;
  Mat form_;  // J for so(p,1); empty otherwise
  double trace_scale_ = 0.0;  // Kill = trace_scale * tr(XY)

  std::vector<Mat> on_basis_;
  Mat basis_vec_;        // ambient^2 x dim, vectorized orthonormal basis
  Mat theta_coords_;     // theta on orthonormal coordinates

  mutable bool roots_ready_ = false;
  mutable RootDecomposition roots_;
};

}  // namespace liewalk
