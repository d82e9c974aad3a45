#pragma once

#include <Eigen/Dense>

namespace liewalk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Default numerical tolerance used across the geometry layer.
inline constexpr double kTol = 1e-8;

/// Outcome of a numerical rank decision.  gap_ratio = s_r / s_{r+1} measures
/// how clear-cut the decision was (infinity when the matrix has full rank or
/// the trailing singular value is exactly zero).  Callers that need reliable
/// integer answers retry their sample when the gap is too small.
struct RankDecision {
  int rank = 0;
  double gap_ratio = 0.0;
  double smax = 0.0;
};

/// Singular values of M, descending.
Vec singular_values(const Mat& M);

/// Rank of M with threshold tol * smax, reporting the spectral gap.
RankDecision numerical_rank(const Mat& M, double tol = kTol);

/// Orthonormal basis of the column span (SVD-based; empty result for rank 0).
Mat orthonormal_columns(const Mat& M, double tol = kTol);

/// Orthonormal basis of the kernel of M (columns; D x nullity).
Mat nullspace(const Mat& M, double tol = kTol);

/// Orthonormal basis of the orthogonal complement of the (orthonormal) frame
/// inside R^D.  frame may have zero columns.
Mat complement_of_frame(const Mat& frame, int ambient_dim, double tol = kTol);

}  // namespace liewalk
