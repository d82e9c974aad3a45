#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liewalk/grassmann.hpp"
#include "liewalk/lie_algebra.hpp"

namespace liewalk {

/// KAK factorization g = theta * exp(H(kappa)) * theta_prime with the two
/// outer factors in the maximal compact subgroup and kappa the coordinates of
/// a Cartan element in the closed positive chamber (sorted convention).
struct CartanTriple {
  Mat theta;
  Vec kappa;  ///< coordinates on cartan_basis()
  Mat theta_prime;
  /// Set when singular values collide at tolerance (the compact factors are
  /// then not unique; the returned triple is still a valid factorization).
  bool non_unique = false;
};

/// The Cartan-subspace matrix sum_b kappa_b * H_b.
Mat cartan_matrix(const LieAlgebra& alg, const Vec& kappa);

/// theta * exp(H(kappa)) * theta_prime.
Mat reconstruct(const LieAlgebra& alg, const CartanTriple& t);

/// Cartan (KAK) decomposition.  For sl(d) this is the SVD with determinant
/// signs fixed; for so(p,1) the boost parameter and axis are read from the
/// top eigenpair of g^T g.  Large inputs are pre-scaled so the decomposition
/// works up to the representable range of the singular values themselves.
CartanTriple cartan_decompose(const LieAlgebra& alg, const Mat& g);

/// Finitely supported probability measure on the group.
struct WalkMeasure {
  std::vector<Mat> atoms;
  std::vector<double> weights;

  /// Checks weights (non-negative, sum 1 within 1e-12) and group membership
  /// of every atom.  Throws BadMeasure / NotInGroup.
  void validate(const LieAlgebra& alg) const;

  /// Inverse-CDF sampling of an atom index.
  int sample_index(Rng& rng) const;
};

/// Product g_n * ... * g_1 of n i.i.d. atoms.  Deterministic given
/// (seed, trial); n = 0 gives the identity.
Mat sample_walk(const LieAlgebra& alg, const WalkMeasure& mu, int n,
                std::uint64_t seed, std::uint64_t trial);

/// Estimated Lyapunov data of Ad(mu): the clustered spectrum of
/// ad(kappa_mu_hat) together with the raw per-direction rates.
struct LyapunovData {
  std::vector<double> lambdas;        ///< cluster means, strictly descending
  std::vector<int> multiplicities;    ///< sum = algebra_dim
  std::vector<double> std_errors;     ///< Monte-Carlo noise per cluster
  Vec kappa_mu_hat;                   ///< mean of kappa(g)/n, Cartan coordinates
  int n_used = 0;
  int trials_used = 0;
  std::vector<double> raw_rates;      ///< all algebra_dim eigenvalues, descending
  std::vector<std::string> warnings;  ///< "ClusterAmbiguity: ..." entries
};

/// Monte-Carlo estimate: kappa_mu_hat = mean over trials of kappa(g)/n for
/// g ~ mu^n, spectrum = eigenvalues of ad(kappa_mu_hat) merged whenever
/// |lambda - lambda'| < max(0.05 * lambda_1, 3 * standard error).  A gap
/// below twice the noise level is reported in `warnings` (data still
/// returned).  Deterministic for fixed seed, independent of `threads`.
LyapunovData estimate_lyapunov(const LieAlgebra& alg, const WalkMeasure& mu,
                               int n, int trials, std::uint64_t seed,
                               int threads = 1);

/// The expanding flag V_i = span of ad(kappa_mu_hat)-eigenspaces with
/// eigenvalue >= lambda_i and the contracting flag W_i (eigenvalue
/// <= -lambda_i); by symmetry of the spectrum W_i equals the orthocomplement
/// of V_{m-i} (and W_m the whole space).  Throws ClusterAmbiguity when the
/// estimate carries warnings.
struct LyapunovFlags {
  Flag expanding;
  Flag contracting;
};

LyapunovFlags lyapunov_flags(const LieAlgebra& alg, const LyapunovData& lyap);

/// Per-trial comparison of the sorted log singular values of Ad(g), g ~ mu^n,
/// against the predicted rates n * raw_rates: `fraction` counts the
/// (trial, direction) pairs within the band e^{+-eps*n}.
struct BoxModelReport {
  int n = 0;
  double eps = 0.0;
  int trials = 0;
  double fraction = 0.0;
  Mat log_singular_over_n;  ///< trials x algebra_dim, descending per row
};

BoxModelReport box_model_check(const LieAlgebra& alg, const WalkMeasure& mu,
                               const LyapunovData& lyap, int n, double eps,
                               int trials, std::uint64_t seed, int threads = 1);

/// Empirical CDF of angle(Ad(theta_g) V_i, W) over walk samples on a rho
/// grid.  Throws HypothesisFail when no sample reaches an angle above
/// hypothesis_eps (the probe would be vacuous).
struct AngleLawTable {
  std::vector<double> rho;
  std::vector<double> probability;
  double max_angle = 0.0;
};

AngleLawTable angle_law_probe(const LieAlgebra& alg, const WalkMeasure& mu,
                              const Flag& expanding, int i, const Subspace& W,
                              std::vector<double> rho_grid, int n, int trials,
                              std::uint64_t seed, int threads = 1,
                              double hypothesis_eps = 0.01);

/// Frequency over g ~ mu^n of the event
///   for every sampled W' in B_rho(W) (W itself included):
///     dim(Ad(theta_g) V_i cap W') / dim W'  <  dim V_i / algebra_dim,
/// decided by exact integer cross-multiplication.  Expected to approach 1 as
/// rho -> 0 for Zariski-dense measures.
double probabilistic_submodularity_probe(const LieAlgebra& alg,
                                         const WalkMeasure& mu,
                                         const Flag& expanding, int i,
                                         const Subspace& W, double rho, int n,
                                         int trials, int w_samples,
                                         std::uint64_t seed, int threads = 1);

}  // namespace liewalk
