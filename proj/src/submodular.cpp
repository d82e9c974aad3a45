#include "liewalk/submodular.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "liewalk/errors.hpp"
#include "liewalk/util.hpp"

namespace liewalk {

namespace {

constexpr double kMinGapRatio = 1e3;
constexpr int kMaxRetries = 5;

}  // namespace

Subspace adjoint_act(const LieAlgebra& alg, const Mat& g, const Subspace& V) {
  if (V.ambient_dim() != alg.algebra_dim())
    throw AmbientMismatch("subspace does not live in the algebra");
  if (V.dim() == 0) return V;
  return Subspace::span_of(alg.adjoint_operator(g) * V.frame());
}

int generic_intersection_dim(const LieAlgebra& alg, const Subspace& V,
                             const Subspace& W, int samples,
                             std::uint64_t seed, int threads) {
  if (samples < 1) throw ConfigError("need samples >= 1");
  if (V.ambient_dim() != alg.algebra_dim() || W.ambient_dim() != alg.algebra_dim())
    throw AmbientMismatch("subspaces must live in the algebra");
  if (V.dim() == 0 || W.dim() == 0) return 0;

  std::vector<int> caps(samples);
  parallel_for(samples, threads, [&](std::int64_t s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    int cap = std::min(V.dim(), W.dim());
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      const Mat g = alg.random_group_element(rng);
      const Subspace moved = adjoint_act(alg, g, V);
      RankDecision decision;
      const int c = intersect_dim(moved, W, kTol, &decision);
      if (decision.gap_ratio >= kMinGapRatio || attempt + 1 == kMaxRetries) {
        cap = c;
        break;
      }
    }
    caps[s] = cap;
  });
  return *std::min_element(caps.begin(), caps.end());
}

SubmodularCheck verify_submodular(const LieAlgebra& alg, const Subspace& V,
                                  const Subspace& W, int samples,
                                  std::uint64_t seed, int threads) {
  SubmodularCheck out;
  out.lhs = generic_intersection_dim(alg, V, W, samples, seed, threads);
  out.rhs_num = static_cast<std::int64_t>(V.dim()) * W.dim();
  out.rhs_den = alg.algebra_dim();
  out.holds = static_cast<std::int64_t>(out.lhs) * out.rhs_den <= out.rhs_num;
  return out;
}

bool supermodularity_check(const LieAlgebra& alg, const Subspace& V1,
                           const Subspace& V2, const Subspace& W, int samples,
                           std::uint64_t seed, int threads) {
  const Subspace meet = intersection(V1, V2);
  const Subspace join = sum(V1, V2);
  const int d1 = generic_intersection_dim(alg, V1, W, samples, derive_seed(seed, 1), threads);
  const int d2 = generic_intersection_dim(alg, V2, W, samples, derive_seed(seed, 2), threads);
  const int dm = generic_intersection_dim(alg, meet, W, samples, derive_seed(seed, 3), threads);
  const int dj = generic_intersection_dim(alg, join, W, samples, derive_seed(seed, 4), threads);
  return d1 + d2 <= dm + dj;
}

namespace {

Vec coords_of(const LieAlgebra& alg, const Mat& X) { return alg.coords(X); }

}  // namespace

Subspace sl3_upper_borel(const LieAlgebra& sl3) {
  if (sl3.family() != Family::SlReal || sl3.param() != 3)
    throw UnsupportedFamily("this construction is specific to sl(3)");
  Mat vecs(sl3.algebra_dim(), 5);
  Mat H1 = Mat::Zero(3, 3), H2 = Mat::Zero(3, 3);
  H1(0, 0) = 1;
  H1(1, 1) = -1;
  H2(1, 1) = 1;
  H2(2, 2) = -1;
  std::vector<Mat> gens = {H1, H2};
  for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
    Mat E = Mat::Zero(3, 3);
    E(i, j) = 1;
    gens.push_back(E);
  }
  for (int c = 0; c < 5; ++c) vecs.col(c) = coords_of(sl3, gens[c]);
  return Subspace::span_of(vecs);
}

Subspace sl3_companion_space(const LieAlgebra& sl3) {
  if (sl3.family() != Family::SlReal || sl3.param() != 3)
    throw UnsupportedFamily("this construction is specific to sl(3)");
  Mat vecs(sl3.algebra_dim(), 3);
  Mat D = Mat::Zero(3, 3);
  D(0, 0) = 1;
  D(1, 1) = 1;
  D(2, 2) = -2;
  Mat E31 = Mat::Zero(3, 3), E32 = Mat::Zero(3, 3);
  E31(2, 0) = 1;
  E32(2, 1) = 1;
  vecs.col(0) = coords_of(sl3, D);
  vecs.col(1) = coords_of(sl3, E31);
  vecs.col(2) = coords_of(sl3, E32);
  return Subspace::span_of(vecs);
}

namespace {

/// Real 2n x 2n block form [[Re, -Im], [Im, Re]] of a complex n x n matrix.
Mat realify(const CMat& M) {
  const int n = static_cast<int>(M.rows());
  Mat R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = M.real();
  R.topRightCorner(n, n) = -M.imag();
  R.bottomLeftCorner(n, n) = M.imag();
  R.bottomRightCorner(n, n) = M.real();
  return R;
}

/// Real frame of the complex column span: columns (Re f; Im f), (-Im f; Re f).
Mat realify_frame(const CMat& F) {
  const int n = static_cast<int>(F.rows());
  const int k = static_cast<int>(F.cols());
  Mat R(2 * n, 2 * k);
  for (int c = 0; c < k; ++c) {
    R.col(2 * c).head(n) = F.col(c).real();
    R.col(2 * c).tail(n) = F.col(c).imag();
    R.col(2 * c + 1).head(n) = -F.col(c).imag();
    R.col(2 * c + 1).tail(n) = F.col(c).real();
  }
  return R;
}

CMat random_complex(int rows, int cols, Rng& rng) {
  CMat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      M(i, j) = std::complex<double>(rng.normal(), rng.normal());
  return M;
}

CMat random_sl_complex(int d, Rng& rng) {
  CMat X = random_complex(d, d, rng);
  X -= (X.trace() / static_cast<double>(d)) * CMat::Identity(d, d);
  const double n = X.norm();
  if (n > 1.5) X *= 1.5 / n;
  return X.exp();
}

CMat kron(const CMat& A, const CMat& B) {
  CMat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

bool j_invariant(const Mat& J, const Subspace& S) {
  return grass_dist(Subspace::span_of(J * S.frame()), S) <= 1e-8;
}

}  // namespace

TensorEqualityReport equality_case_tensor(int d1, int d2, int e1, int e2,
                                          int samples, std::uint64_t seed) {
  if (d1 < 2 || d2 < 2) throw ParamTooSmall("need d1, d2 >= 2");
  if (e1 < 1 || e1 > d1 || e2 < 1 || e2 > d2)
    throw ParamTooSmall("need 1 <= e_i <= d_i");
  if (samples < 1) throw ConfigError("need samples >= 1");

  const int N = d1 * d2;
  Rng setup_rng(seed, 0);
  const CMat E1 = random_complex(d1, e1, setup_rng);
  const CMat E2 = random_complex(d2, e2, setup_rng);

  // V = H_1 (x) E_2 and W = E_1 (x) H_2 as realified spans.
  const Subspace V = Subspace::span_of(
      realify_frame(kron(CMat::Identity(d1, d1), E2)));
  const Subspace W = Subspace::span_of(
      realify_frame(kron(E1, CMat::Identity(d2, d2))));

  Mat J = Mat::Zero(2 * N, 2 * N);
  J.topRightCorner(N, N) = -Mat::Identity(N, N);
  J.bottomLeftCorner(N, N) = Mat::Identity(N, N);

  TensorEqualityReport rep;
  rep.samples = samples;
  rep.expected_intersection_dim = 2 * e1 * e2;
  rep.dims_exact = true;
  rep.splitting_holds = true;
  rep.complex_structure_ok = j_invariant(J, V) && j_invariant(J, W);

  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s + 1));
    const CMat g = kron(random_sl_complex(d1, rng), random_sl_complex(d2, rng));
    const Subspace gV = Subspace::span_of(realify(g) * V.frame());
    if (gV.dim() != V.dim()) rep.dims_exact = false;
    if (intersect_dim(gV, W) != rep.expected_intersection_dim)
      rep.dims_exact = false;
    if (!j_invariant(J, gV)) rep.complex_structure_ok = false;

    // Complementary pair W' = E' (x) H_2, W'' = E'' (x) H_2 from a random
    // change of basis h of C^{d1}; the lattice equality gV = (gV cap W')
    // (+) (gV cap W'') must hold sample-wise.
    if (e1 < d1) {
      const CMat h = random_complex(d1, d1, rng);
      const Subspace Wp = Subspace::span_of(
          realify_frame(kron(h.leftCols(e1), CMat::Identity(d2, d2))));
      const Subspace Wpp = Subspace::span_of(
          realify_frame(kron(h.rightCols(d1 - e1), CMat::Identity(d2, d2))));
      const Subspace S1 = intersection(gV, Wp);
      const Subspace S2 = intersection(gV, Wpp);
      if (S1.dim() + S2.dim() != gV.dim()) {
        rep.splitting_holds = false;
      } else {
        Mat stacked(2 * N, S1.dim() + S2.dim());
        stacked << S1.frame(), S2.frame();
        if (numerical_rank(stacked).rank != gV.dim()) rep.splitting_holds = false;
      }
    }
  }
  return rep;
}

}  // namespace liewalk
