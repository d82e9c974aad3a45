#include "liewalk/cartan_walk.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "liewalk/errors.hpp"
#include "liewalk/util.hpp"

namespace liewalk {

namespace {

constexpr double kDegenerateSv = 1e-8;

/// Rotation of the first p coordinates of R^m carrying the unit vector `from`
/// to the unit vector `to` (identity on the orthogonal complement of their
/// plane and on the remaining coordinates).
Mat rotation_between(int m, const Vec& from, const Vec& to) {
  Mat R = Mat::Identity(m, m);
  const double c = from.dot(to);
  Vec q = to - c * from;
  const double qn = q.norm();
  if (qn < 1e-14) {
    if (c > 0) return R;  // from == to
    // Antipodal: rotate by pi in the plane of `from` and any orthogonal axis.
    int k = 0;
    for (int i = 1; i < from.size(); ++i)
      if (std::abs(from(i)) < std::abs(from(k))) k = i;
    q = Vec::Zero(from.size());
    q(k) = 1.0;
    q -= q.dot(from) * from;
    q.normalize();
    R += -2.0 * (from * from.transpose()) - 2.0 * (q * q.transpose());
    return R;
  }
  q /= qn;
  const double s = qn;  // sin of the rotation angle
  R += s * (q * from.transpose() - from * q.transpose()) +
       (c - 1.0) * (from * from.transpose() + q * q.transpose());
  return R;
}

CartanTriple decompose_sl(const LieAlgebra& alg, const Mat& g) {
  const int d = alg.ambient_dim();
  const double s = g.cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Mat> svd(g / s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat U = svd.matrixU();
  Mat V = svd.matrixV();
  if (U.determinant() < 0) {
    // det U = det V since det g = 1; flip the last column of both, which
    // leaves U * Sigma * V^T unchanged.
    U.col(d - 1) *= -1.0;
    V.col(d - 1) *= -1.0;
  }
  Vec a(d);  // log singular values, descending
  for (int i = 0; i < d; ++i) a(i) = std::log(svd.singularValues()(i)) + std::log(s);
  // Traceless correction: log det should vanish; spread any drift evenly.
  const double drift = a.sum() / d;
  a.array() -= drift;

  CartanTriple t;
  t.theta = U;
  t.theta_prime = V.transpose();
  t.kappa = Vec(d - 1);
  double run = 0.0;  // diag(a) = sum_i kappa_i (E_ii - E_{i+1,i+1})
  for (int i = 0; i + 1 < d; ++i) {
    run += a(i);
    t.kappa(i) = run;
  }
  for (int i = 0; i + 1 < d; ++i)
    if (a(i) - a(i + 1) < kDegenerateSv) t.non_unique = true;
  return t;
}

CartanTriple decompose_so_p1(const LieAlgebra& alg, const Mat& g) {
  const int m = alg.ambient_dim();
  const int p = m - 1;
  const double s = g.cwiseAbs().maxCoeff();
  const Mat P = (g / s).transpose() * (g / s);
  Eigen::SelfAdjointEigenSolver<Mat> es(P);
  const double lmax = es.eigenvalues()(m - 1);
  const double tval = 0.5 * std::log(lmax) + std::log(s);

  CartanTriple t;
  t.kappa = Vec::Constant(1, tval);
  t.non_unique = tval < kDegenerateSv;

  // Top eigenvector of g^T g is (w', e_m)/sqrt(2) for the boost axis w'.
  Vec u = es.eigenvectors().col(m - 1);
  if (u(p) < 0) u = -u;
  Vec w = u.head(p);
  if (t.non_unique || w.norm() < 1e-12) {
    w = Vec::Zero(p);
    w(p - 1) = 1.0;
  } else {
    w.normalize();
  }

  // k2 rotates the boost axis back to e_p.
  Vec to = Vec::Zero(p);
  to(p - 1) = 1.0;
  Mat R2 = rotation_between(p, w, to);
  t.theta_prime = Mat::Identity(m, m);
  t.theta_prime.topLeftCorner(p, p) = R2;

  // a^{-1} = exp(-t B) in closed form: B^3 = B.
  Mat B = Mat::Zero(m, m);
  B(p - 1, p) = 1.0;
  B(p, p - 1) = 1.0;
  const Mat a_inv = Mat::Identity(m, m) + std::sinh(-tval) * B +
                    (std::cosh(tval) - 1.0) * B * B;
  t.theta = g * t.theta_prime.transpose() * a_inv;
  return t;
}

}  // namespace

Mat cartan_matrix(const LieAlgebra& alg, const Vec& kappa) {
  const auto cb = alg.cartan_basis();
  if (static_cast<int>(cb.size()) != kappa.size())
    throw AmbientMismatch("kappa length does not match the Cartan rank");
  Mat H = Mat::Zero(alg.ambient_dim(), alg.ambient_dim());
  for (size_t b = 0; b < cb.size(); ++b) H += kappa(b) * cb[b];
  return H;
}

Mat reconstruct(const LieAlgebra& alg, const CartanTriple& t) {
  return t.theta * cartan_matrix(alg, t.kappa).exp() * t.theta_prime;
}

CartanTriple cartan_decompose(const LieAlgebra& alg, const Mat& g) {
  alg.require_in_group(g, alg.tol());
  switch (alg.family()) {
    case Family::SlReal:
      return decompose_sl(alg, g);
    case Family::SoP1:
      return decompose_so_p1(alg, g);
    default:
      throw UnsupportedFamily("Cartan decomposition covers the real families only");
  }
}

void WalkMeasure::validate(const LieAlgebra& alg) const {
  if (atoms.empty() || atoms.size() != weights.size())
    throw BadMeasure("need matching non-empty atoms and weights");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw BadMeasure("negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw BadMeasure("weights do not sum to 1");
  for (const Mat& atom : atoms) alg.require_in_group(atom, alg.tol());
}

int WalkMeasure::sample_index(Rng& rng) const {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (size_t k = 0; k < weights.size(); ++k) {
    cum += weights[k];
    if (u < cum) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

Mat sample_walk(const LieAlgebra& alg, const WalkMeasure& mu, int n,
                std::uint64_t seed, std::uint64_t trial) {
  Rng rng(seed, trial);
  Mat g = Mat::Identity(alg.ambient_dim(), alg.ambient_dim());
  for (int step = 0; step < n; ++step) g = mu.atoms[mu.sample_index(rng)] * g;
  return g;
}

LyapunovData estimate_lyapunov(const LieAlgebra& alg, const WalkMeasure& mu,
                               int n, int trials, std::uint64_t seed,
                               int threads) {
  if (n < 1 || trials < 1) throw BadMeasure("need n >= 1 and trials >= 1");
  mu.validate(alg);
  const int rank = alg.rank();
  const int dim = alg.algebra_dim();

  Mat kappas(trials, rank);
  parallel_for(trials, threads, [&](std::int64_t t) {
    const Mat g = sample_walk(alg, mu, n, seed, static_cast<std::uint64_t>(t));
    kappas.row(t) = cartan_decompose(alg, g).kappa.transpose();
  });

  LyapunovData out;
  out.n_used = n;
  out.trials_used = trials;
  out.kappa_mu_hat = kappas.colwise().mean().transpose() / n;

  const Mat H = cartan_matrix(alg, out.kappa_mu_hat);
  const Mat A = alg.ad_matrix(H);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));

  // Ascending from Eigen; flip to descending.
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::reverse(order.begin(), order.end());
  out.raw_rates.resize(dim);
  for (int j = 0; j < dim; ++j) out.raw_rates[j] = es.eigenvalues()(order[j]);

  // Per-direction Monte-Carlo rates x_{t,j} = v_j^T ad(H_t/n) v_j, expanded
  // over the Cartan basis so each trial costs O(rank * dim).
  std::vector<Mat> cartan_ads;
  for (const Mat& Hb : alg.cartan_basis()) cartan_ads.push_back(alg.ad_matrix(Hb));
  Mat q(rank, dim);
  for (int b = 0; b < rank; ++b)
    for (int j = 0; j < dim; ++j) {
      const Vec v = es.eigenvectors().col(order[j]);
      q(b, j) = v.dot(cartan_ads[b] * v);
    }
  std::vector<double> se(dim, 0.0);
  if (trials > 1) {
    for (int j = 0; j < dim; ++j) {
      double mean = 0.0, m2 = 0.0;
      for (int t = 0; t < trials; ++t) {
        double x = 0.0;
        for (int b = 0; b < rank; ++b) x += kappas(t, b) / n * q(b, j);
        const double delta = x - mean;
        mean += delta / (t + 1);
        m2 += delta * (x - mean);
      }
      se[j] = std::sqrt(m2 / (trials - 1)) / std::sqrt(static_cast<double>(trials));
    }
  }

  // Merge adjacent rates into clusters.
  const double lambda1 = std::max(std::abs(out.raw_rates.front()),
                                  std::abs(out.raw_rates.back()));
  struct Cluster {
    double sum = 0.0;
    double se_sum = 0.0;
    int count = 0;
    double mean() const { return sum / count; }
    double se() const { return se_sum / count; }
  };
  std::vector<Cluster> clusters;
  for (int j = 0; j < dim; ++j) {
    const double merge_tol = std::max(0.05 * lambda1, 3.0 * se[j]);
    if (!clusters.empty() &&
        std::abs(out.raw_rates[j] - clusters.back().mean()) < merge_tol) {
      clusters.back().sum += out.raw_rates[j];
      clusters.back().se_sum += se[j];
      clusters.back().count += 1;
    } else {
      clusters.push_back({out.raw_rates[j], se[j], 1});
    }
  }
  for (size_t c = 0; c + 1 < clusters.size(); ++c) {
    const double gap = clusters[c].mean() - clusters[c + 1].mean();
    const double noise = 3.0 * std::max(clusters[c].se(), clusters[c + 1].se());
    if (noise > 0.0 && gap < 2.0 * noise)
      out.warnings.push_back("ClusterAmbiguity: spectral gap " + std::to_string(gap) +
                             " below twice the noise level " + std::to_string(noise));
  }
  for (const Cluster& c : clusters) {
    out.lambdas.push_back(c.mean());
    out.multiplicities.push_back(c.count);
    out.std_errors.push_back(c.se());
  }
  return out;
}

LyapunovFlags lyapunov_flags(const LieAlgebra& alg, const LyapunovData& lyap) {
  if (!lyap.warnings.empty())
    throw ClusterAmbiguity("refusing to build flags from an ambiguous spectrum: " +
                           lyap.warnings.front());
  const int dim = alg.algebra_dim();
  const Mat H = cartan_matrix(alg, lyap.kappa_mu_hat);
  const Mat A = alg.ad_matrix(H);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));

  // Columns in descending eigenvalue order.
  Mat basis(dim, dim);
  for (int j = 0; j < dim; ++j) basis.col(j) = es.eigenvectors().col(dim - 1 - j);

  const int m1 = static_cast<int>(lyap.lambdas.size());  // m + 1 clusters
  LyapunovFlags out;
  int taken = 0;
  for (int i = 0; i < m1; ++i) {
    taken += lyap.multiplicities[i];
    out.expanding.spaces.push_back(
        Subspace::from_frame(basis.leftCols(taken)));
  }
  int taken_rev = 0;
  for (int i = 0; i < m1; ++i) {
    // W_i collects the eigenvalues <= -lambda_i; by negation symmetry these
    // are the last clusters, i.e. exactly the orthocomplement of V_{m+1-i}.
    taken_rev += lyap.multiplicities[m1 - 1 - i];
    out.contracting.spaces.push_back(
        Subspace::from_frame(basis.rightCols(taken_rev)));
  }
  out.expanding.validate();
  out.contracting.validate();
  return out;
}

BoxModelReport box_model_check(const LieAlgebra& alg, const WalkMeasure& mu,
                               const LyapunovData& lyap, int n, double eps,
                               int trials, std::uint64_t seed, int threads) {
  if (n < 1 || eps <= 0.0 || trials < 1)
    throw BadMeasure("need n >= 1, eps > 0, trials >= 1");
  mu.validate(alg);
  const int dim = alg.algebra_dim();
  std::vector<Mat> atom_ads;
  for (const Mat& atom : mu.atoms) atom_ads.push_back(alg.adjoint_operator(atom));

  BoxModelReport rep;
  rep.n = n;
  rep.eps = eps;
  rep.trials = trials;
  rep.log_singular_over_n = Mat(trials, dim);

  parallel_for(trials, threads, [&](std::int64_t t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    Mat M = Mat::Identity(dim, dim);
    double log_acc = 0.0;  // running normalization so the product never overflows
    for (int step = 0; step < n; ++step) {
      M = atom_ads[mu.sample_index(rng)] * M;
      const double s = M.cwiseAbs().maxCoeff();
      log_acc += std::log(s);
      M /= s;
    }
    Eigen::JacobiSVD<Mat> svd(M);
    for (int j = 0; j < dim; ++j)
      rep.log_singular_over_n(t, j) =
          (std::log(svd.singularValues()(j)) + log_acc) / n;
  });

  std::int64_t inside = 0;
  for (int t = 0; t < trials; ++t)
    for (int j = 0; j < dim; ++j)
      if (std::abs(rep.log_singular_over_n(t, j) - lyap.raw_rates[j]) <= eps)
        ++inside;
  rep.fraction = static_cast<double>(inside) / (static_cast<double>(trials) * dim);
  return rep;
}

AngleLawTable angle_law_probe(const LieAlgebra& alg, const WalkMeasure& mu,
                              const Flag& expanding, int i, const Subspace& W,
                              std::vector<double> rho_grid, int n, int trials,
                              std::uint64_t seed, int threads,
                              double hypothesis_eps) {
  if (i < 1 || i > static_cast<int>(expanding.spaces.size()))
    throw ConfigError("flag index out of range");
  if (trials < 1) throw BadMeasure("need trials >= 1");
  mu.validate(alg);
  const Subspace& Vi = expanding.spaces[i - 1];
  std::sort(rho_grid.begin(), rho_grid.end());

  std::vector<double> angles(trials);
  parallel_for(trials, threads, [&](std::int64_t t) {
    const Mat g = sample_walk(alg, mu, n, seed, static_cast<std::uint64_t>(t));
    const CartanTriple tri = cartan_decompose(alg, g);
    const Mat K = alg.adjoint_operator(tri.theta);
    angles[t] = angle(Subspace::span_of(K * Vi.frame()), W);
  });

  AngleLawTable out;
  out.max_angle = *std::max_element(angles.begin(), angles.end());
  if (out.max_angle <= hypothesis_eps)
    throw HypothesisFail("no sampled compact factor reaches angle > " +
                         std::to_string(hypothesis_eps) + "; the probe is vacuous");
  for (double rho : rho_grid) {
    std::int64_t cnt = 0;
    for (double a : angles)
      if (a <= rho) ++cnt;
    out.rho.push_back(rho);
    out.probability.push_back(static_cast<double>(cnt) / trials);
  }
  return out;
}

double probabilistic_submodularity_probe(const LieAlgebra& alg,
                                         const WalkMeasure& mu,
                                         const Flag& expanding, int i,
                                         const Subspace& W, double rho, int n,
                                         int trials, int w_samples,
                                         std::uint64_t seed, int threads) {
  if (i < 1 || i > static_cast<int>(expanding.spaces.size()))
    throw ConfigError("flag index out of range");
  const Subspace& Vi = expanding.spaces[i - 1];
  if (W.dim() == 0 || W.dim() == W.ambient_dim())
    throw ConfigError("W must be a nonzero proper subspace");
  if (Vi.dim() >= alg.algebra_dim())
    throw ConfigError("V_i must be a proper subspace for the ratio test");
  if (rho <= 0.0 || rho >= 1.0) throw InvalidRho("need 0 < rho < 1");
  mu.validate(alg);

  const int dim = alg.algebra_dim();
  std::vector<int> good(trials, 0);
  parallel_for(trials, threads, [&](std::int64_t t) {
    const Mat g = sample_walk(alg, mu, n, seed, static_cast<std::uint64_t>(t));
    const CartanTriple tri = cartan_decompose(alg, g);
    const Mat K = alg.adjoint_operator(tri.theta);
    const Subspace AV = Subspace::span_of(K * Vi.frame());
    Rng perturb_rng(derive_seed(seed, static_cast<std::uint64_t>(t)), 1);
    bool all_pass = true;
    for (int s = 0; s < w_samples && all_pass; ++s) {
      const Subspace Wp = (s == 0) ? W : perturb_subspace(W, rho, perturb_rng);
      const int cap = intersect_dim(AV, Wp);
      // dim(AV cap W') / dim W' < dim V_i / dim g, cross-multiplied.
      if (!(static_cast<std::int64_t>(cap) * dim <
            static_cast<std::int64_t>(Vi.dim()) * Wp.dim()))
        all_pass = false;
    }
    good[t] = all_pass ? 1 : 0;
  });
  std::int64_t sum = 0;
  for (int v : good) sum += v;
  return static_cast<double>(sum) / trials;
}

}  // namespace liewalk
