#include "liewalk/lie_algebra.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "liewalk/errors.hpp"

namespace liewalk {

namespace {

Mat unit_matrix(int n, int i, int j) {
  Mat E = Mat::Zero(n, n);
  E(i, j) = 1.0;
  return E;
}

Vec vectorize(const Mat& M) {
  return Eigen::Map<const Vec>(M.data(), M.size());
}

}  // namespace

LieAlgebra LieAlgebra::build(Family family, int param, double tol) {
  LieAlgebra g;
  g.family_ = family;
  g.param_ = param;
  g.tol_ = tol;
  switch (family) {
    case Family::SlReal:
      if (param < 2) throw ParamTooSmall("sl(d) needs d >= 2");
      g.build_sl(param);
      break;
    case Family::SoP1:
      if (param < 2) throw ParamTooSmall("so(p,1) needs p >= 2");
      g.build_so_p1(param);
      break;
    case Family::SoQComplex:
      if (param < 2) throw ParamTooSmall("so(q,C) model needs n >= 2");
      g.build_so_q_complex(param);
      break;
    default:
      throw UnsupportedFamily("unknown family tag");
  }
  return g;
}

void LieAlgebra::build_sl(int d) {
  ambient_dim_ = d;
  algebra_dim_ = d * d - 1;
  trace_scale_ = 2.0 * d;
  // Cartan subspace first: H_i = E_ii - E_{i+1,i+1}.
  for (int i = 0; i + 1 < d; ++i) {
    basis_.push_back(unit_matrix(d, i, i) - unit_matrix(d, i + 1, i + 1));
    cartan_indices_.push_back(static_cast<int>(basis_.size()) - 1);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j) basis_.push_back(unit_matrix(d, i, j));
  finish_real_family();
}

void LieAlgebra::build_so_p1(int p) {
  const int m = p + 1;
  ambient_dim_ = m;
  algebra_dim_ = p * (p + 1) / 2;
  trace_scale_ = static_cast<double>(m - 2);
  form_ = Mat::Identity(m, m);
  form_(p, p) = -1.0;
  // Rotations among the first p coordinates.
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b)
      basis_.push_back(unit_matrix(m, a, b) - unit_matrix(m, b, a));
  // Boosts; the last one spans the standard Cartan subspace.
  for (int a = 0; a < p; ++a)
    basis_.push_back(unit_matrix(m, a, p) + unit_matrix(m, p, a));
  cartan_indices_.push_back(static_cast<int>(basis_.size()) - 1);
  finish_real_family();
}

void LieAlgebra::build_so_q_complex(int n) {
  ambient_dim_ = 2 * n;
  algebra_dim_ = n * (2 * n - 1);
  trace_scale_ = 2.0 * n - 2.0;
  const int N = 2 * n;
  auto push = [&](const Mat& re) { basis_c_.emplace_back(re, Mat::Zero(N, N)); };
  // Diagonal part: H_k = E_kk - E_{n+k,n+k}.
  for (int k = 0; k < n; ++k)
    push(unit_matrix(N, k, k) - unit_matrix(N, n + k, n + k));
  // Y_{k,l} = E_{k,l} - E_{n+l,n+k} (k != l), root L_k - L_l.
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (k != l) push(unit_matrix(N, k, l) - unit_matrix(N, n + l, n + k));
  // Z_{k,l} = E_{k,n+l} - E_{l,n+k} (k < l), root L_k + L_l, and transposes.
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      push(unit_matrix(N, k, n + l) - unit_matrix(N, l, n + k));
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l)
      push((unit_matrix(N, k, n + l) - unit_matrix(N, l, n + k)).transpose());
  if (static_cast<int>(basis_c_.size()) != algebra_dim_)
    throw DegenerateCartan("complex basis count mismatch");
}

void LieAlgebra::finish_real_family() {
  if (static_cast<int>(basis_.size()) != algebra_dim_)
    throw DegenerateCartan("basis count mismatch");
  const int n2 = ambient_dim_ * ambient_dim_;

  // The invariant inner product -Kill(X, theta Y) is trace_scale * <X,Y>_F
  // for these matrix models, so a Frobenius QR gives the orthonormal basis.
  Mat raw(n2, algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b) raw.col(b) = vectorize(basis_[b]);
  Eigen::HouseholderQR<Mat> qr(raw);
  Mat thinQ = qr.householderQ() * Mat::Identity(n2, algebra_dim_);
  // Fix signs so the leading entry of each column is positive (determinism).
  for (int b = 0; b < algebra_dim_; ++b) {
    int lead = 0;
    while (lead < n2 && std::abs(thinQ(lead, b)) < 1e-12) ++lead;
    if (lead < n2 && thinQ(lead, b) < 0) thinQ.col(b) *= -1.0;
  }
  const double scale = 1.0 / std::sqrt(trace_scale_);
  on_basis_.resize(algebra_dim_);
  basis_vec_ = Mat(n2, algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b) {
    Mat M = Eigen::Map<const Mat>(thinQ.col(b).data(), ambient_dim_, ambient_dim_);
    on_basis_[b] = scale * M;
    basis_vec_.col(b) = vectorize(on_basis_[b]);
  }

  // theta on coordinates.
  theta_coords_ = Mat(algebra_dim_, algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b)
    theta_coords_.col(b) = coords(theta(on_basis_[b]));

  // Killing Gram on the structural basis, by the definition tr(ad . ad).
  std::vector<Mat> ads(algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b) ads[b] = ad_matrix(basis_[b]);
  killing_gram_ = Mat(algebra_dim_, algebra_dim_);
  for (int a = 0; a < algebra_dim_; ++a)
    for (int b = a; b < algebra_dim_; ++b)
      killing_gram_(a, b) = killing_gram_(b, a) = (ads[a] * ads[b]).trace();
}

std::vector<Mat> LieAlgebra::cartan_basis() const {
  std::vector<Mat> out;
  for (int idx : cartan_indices_) out.push_back(basis_[idx]);
  return out;
}

double LieAlgebra::killing(const Mat& X, const Mat& Y) const {
  return (ad_matrix(X) * ad_matrix(Y)).trace();
}

double LieAlgebra::killing_matrix_trace(const Mat& X, const Mat& Y) const {
  return trace_scale_ * (X * Y).trace();
}

Mat LieAlgebra::theta(const Mat& X) const { return -X.transpose(); }

double LieAlgebra::inner(const Mat& X, const Mat& Y) const {
  // -Kill(X, theta Y) via the trace form; equals trace_scale * <X,Y>_F.
  return trace_scale_ * X.cwiseProduct(Y).sum();
}

Vec LieAlgebra::coords(const Mat& X) const {
  if (is_complex()) throw UnsupportedFamily("coords: complex family is handled elsewhere");
  if (X.rows() != ambient_dim_ || X.cols() != ambient_dim_)
    throw NotInAlgebra("matrix has the wrong size");
  Vec c(algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b) c(b) = inner(on_basis_[b], X);
  // Residual check: X must be in the span.
  const Vec rec = basis_vec_ * c;
  const double nx = std::max(1e-300, X.norm());
  if ((rec - vectorize(X)).norm() > 1e3 * tol_ * nx)
    throw NotInAlgebra("matrix is not in the algebra (residual too large)");
  return c;
}

Mat LieAlgebra::from_coords(const Vec& c) const {
  Mat X = Mat::Zero(ambient_dim_, ambient_dim_);
  for (int b = 0; b < algebra_dim_; ++b) X += c(b) * on_basis_[b];
  return X;
}

Mat LieAlgebra::ad_matrix(const Mat& X) const {
  Mat A(algebra_dim_, algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b) {
    const Mat br = X * on_basis_[b] - on_basis_[b] * X;
    for (int a = 0; a < algebra_dim_; ++a) A(a, b) = inner(on_basis_[a], br);
  }
  return A;
}

bool LieAlgebra::in_group(const Mat& g, double tol) const {
  if (g.rows() != ambient_dim_ || g.cols() != ambient_dim_) return false;
  // The determinant of a d x d matrix with entries of size |g| is evaluated
  // with absolute error on the order of |g|^d * eps (cancellation), so the
  // unimodularity test has to scale accordingly or long walk products with
  // honest singular-value growth would be rejected.
  const double det_scale =
      std::max(1.0, std::pow(g.norm(), static_cast<double>(ambient_dim_)));
  switch (family_) {
    case Family::SlReal:
      return std::abs(g.determinant() - 1.0) <= tol * 10.0 * det_scale;
    case Family::SoP1: {
      const double form_err = (g.transpose() * form_ * g - form_).cwiseAbs().maxCoeff();
      const double scale = std::max(1.0, g.squaredNorm());
      if (form_err > tol * 10.0 * scale) return false;
      if (std::abs(g.determinant() - 1.0) > tol * 100.0 * det_scale) return false;
      // Identity component: the lower-right entry of any element of SO(p,1)^0
      // is cosh of the boost part, hence >= 1.
      return g(ambient_dim_ - 1, ambient_dim_ - 1) >= 1.0 - tol * 10.0;
    }
    default:
      return false;
  }
}

void LieAlgebra::require_in_group(const Mat& g, double tol) const {
  if (!in_group(g, tol)) throw NotInGroup("matrix fails the group membership test");
}

Mat LieAlgebra::adjoint_operator(const Mat& g) const {
  require_in_group(g, tol_);
  const Mat gi = g.inverse();
  Mat A(algebra_dim_, algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b) {
    const Mat t = g * on_basis_[b] * gi;
    for (int a = 0; a < algebra_dim_; ++a) A(a, b) = inner(on_basis_[a], t);
  }
  return A;
}

Mat LieAlgebra::random_algebra_element(Rng& rng, double norm_clamp) const {
  Vec c(algebra_dim_);
  for (int b = 0; b < algebra_dim_; ++b) c(b) = rng.normal();
  const double n = c.norm();
  if (n > norm_clamp) c *= norm_clamp / n;
  return from_coords(c);
}

Mat LieAlgebra::random_group_element(Rng& rng, int factors, double norm_clamp) const {
  Mat g = Mat::Identity(ambient_dim_, ambient_dim_);
  for (int f = 0; f < factors; ++f) {
    const Mat X = random_algebra_element(rng, norm_clamp);
    g = g * X.exp();
  }
  return g;
}

Mat LieAlgebra::regular_cartan_element() const {
  Mat H = Mat::Zero(ambient_dim_, ambient_dim_);
  switch (family_) {
    case Family::SlReal: {
      // Strictly decreasing diagonal 2^{-1} > 2^{-2} > ... (centered to be
      // traceless): dominant and regular, and all root values are distinct.
      double mean = 0.0;
      for (int i = 0; i < ambient_dim_; ++i) mean += std::pow(2.0, -(i + 1));
      mean /= ambient_dim_;
      for (int i = 0; i < ambient_dim_; ++i) H(i, i) = std::pow(2.0, -(i + 1)) - mean;
      break;
    }
    case Family::SoP1:
      // The standard boost generator spans the (one-dimensional) Cartan
      // subspace; it is regular, and taking it with a + sign fixes the
      // positive root.
      H = basis_[cartan_indices_[0]];
      break;
    default:
      throw UnsupportedFamily("regular Cartan element is defined for the real families only");
  }
  return H;
}

const RootDecomposition& LieAlgebra::restricted_roots() const {
  if (roots_ready_) return roots_;
  if (is_complex())
    throw UnsupportedFamily("restricted roots are provided for the real families only");

  const Mat Hstar = regular_cartan_element();
  const Mat A = ad_matrix(Hstar);
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, A.norm()))
    throw DegenerateCartan("ad of the regular element is not self-adjoint");

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
  const Vec ev = es.eigenvalues();
  const Mat evec = es.eigenvectors();

  // Cluster the eigenvalues.  Root values on the regular element are
  // separated by at least about 8^{-rank} / 3, far above this threshold for
  // the parameter sizes this library targets.
  const double cluster_tol = 1e-6;
  std::vector<std::pair<double, std::vector<int>>> clusters;
  for (int i = 0; i < ev.size(); ++i) {
    if (!clusters.empty() && std::abs(ev(i) - clusters.back().first) < cluster_tol) {
      clusters.back().second.push_back(i);
      const auto& idx = clusters.back().second;
      double mean = 0.0;
      for (int k : idx) mean += ev(k);
      clusters.back().first = mean / static_cast<double>(idx.size());
    } else {
      clusters.push_back({ev(i), {i}});
    }
  }

  RootDecomposition out;
  out.centralizer = Subspace(algebra_dim_);
  std::vector<RestrictedRoot> negative;
  std::vector<double> positive_values;  // value on H*, parallel to out.positive
  const int rank_a = rank();
  std::vector<Mat> cartan_ads;
  for (int idx : cartan_indices_) cartan_ads.push_back(ad_matrix(basis_[idx]));

  for (const auto& [lambda, idx] : clusters) {
    Mat frame(algebra_dim_, idx.size());
    for (size_t k = 0; k < idx.size(); ++k) frame.col(k) = evec.col(idx[k]);
    if (std::abs(lambda) < cluster_tol) {
      out.centralizer = Subspace::from_frame(frame);
      continue;
    }
    RestrictedRoot root;
    root.multiplicity = static_cast<int>(idx.size());
    root.space = Subspace::from_frame(frame);
    root.on_cartan_basis = Vec(rank_a);
    for (int b = 0; b < rank_a; ++b) {
      const Vec v0 = frame.col(0);
      root.on_cartan_basis(b) = v0.dot(cartan_ads[b] * v0);
      // Bracket eigen-relation on the whole root space.
      const Mat resid = cartan_ads[b] * frame - root.on_cartan_basis(b) * frame;
      if (resid.cwiseAbs().maxCoeff() > 1e-6)
        throw DegenerateCartan("bracket eigen-relation fails on a root space");
    }
    if (lambda > 0) {
      out.positive.push_back(std::move(root));
      positive_values.push_back(lambda);
    } else {
      negative.push_back(std::move(root));
    }
  }

  // Order positive roots by their value on the regular element, descending.
  std::vector<int> order(out.positive.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return positive_values[a] > positive_values[b];
  });
  std::vector<RestrictedRoot> sorted_pos;
  for (int k : order) sorted_pos.push_back(std::move(out.positive[k]));
  out.positive = std::move(sorted_pos);

  // Verify the +/- pairing and that theta swaps opposite root spaces.
  int mult_sum = 0;
  for (const RestrictedRoot& pos : out.positive) {
    mult_sum += pos.multiplicity;
    bool matched = false;
    for (const RestrictedRoot& neg : negative) {
      if ((pos.on_cartan_basis + neg.on_cartan_basis).cwiseAbs().maxCoeff() < 1e-5) {
        if (neg.multiplicity != pos.multiplicity)
          throw DegenerateCartan("opposite roots with different multiplicities");
        const Subspace theta_space =
            Subspace::span_of(theta_coords_ * pos.space.frame());
        if (grass_dist(theta_space, neg.space) > 1e-6)
          throw DegenerateCartan("theta does not swap opposite root spaces");
        matched = true;
        break;
      }
    }
    if (!matched) throw DegenerateCartan("unpaired restricted root");
  }
  if (2 * mult_sum + out.centralizer.dim() != algebra_dim_)
    throw DegenerateCartan("root multiplicities and centralizer do not fill the algebra");

  roots_ = std::move(out);
  roots_ready_ = true;
  return roots_;
}

}  // namespace liewalk
