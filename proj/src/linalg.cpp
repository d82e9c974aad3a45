#include "liewalk/linalg.hpp"

#include <limits>

namespace liewalk {

namespace {

Eigen::JacobiSVD<Mat> thin_svd(const Mat& M, unsigned options) {
  return Eigen::JacobiSVD<Mat>(M, options);
}

}  // namespace

Vec singular_values(const Mat& M) {
  if (M.rows() == 0 || M.cols() == 0) return Vec();
  return thin_svd(M, 0).singularValues();
}

RankDecision numerical_rank(const Mat& M, double tol) {
  RankDecision d;
  const Vec s = singular_values(M);
  if (s.size() == 0) {
    d.gap_ratio = std::numeric_limits<double>::infinity();
    return d;
  }
  d.smax = s(0);
  const double cut = tol * std::max(d.smax, 1.0e-300);
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  d.rank = r;
  if (r == s.size() || s(r) <= 0.0) {
    d.gap_ratio = std::numeric_limits<double>::infinity();
  } else if (r == 0) {
    d.gap_ratio = std::numeric_limits<double>::infinity();  // everything tiny
  } else {
    d.gap_ratio = s(r - 1) / s(r);
  }
  return d;
}

Mat orthonormal_columns(const Mat& M, double tol) {
  if (M.rows() == 0 || M.cols() == 0) return Mat(M.rows(), 0);
  Eigen::JacobiSVD<Mat> svd = thin_svd(M, Eigen::ComputeThinU);
  const Vec s = svd.singularValues();
  const double cut = (s.size() > 0 ? tol * std::max(s(0), 1.0e-300) : 0.0);
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

Mat nullspace(const Mat& M, double tol) {
  if (M.cols() == 0) return Mat(0, 0);
  if (M.rows() == 0) return Mat::Identity(M.cols(), M.cols());
  Eigen::JacobiSVD<Mat> svd = thin_svd(M, Eigen::ComputeFullV);
  const Vec s = svd.singularValues();
  const double cut = (s.size() > 0 ? tol * std::max(s(0), 1.0e-300) : 0.0);
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixV().rightCols(M.cols() - r);
}

Mat complement_of_frame(const Mat& frame, int ambient_dim, double tol) {
  if (frame.cols() == 0) return Mat::Identity(ambient_dim, ambient_dim);
  if (frame.cols() >= ambient_dim) return Mat(ambient_dim, 0);
  return nullspace(frame.transpose(), tol);
}

}  // namespace liewalk
