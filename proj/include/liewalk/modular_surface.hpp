#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "liewalk/cartan_walk.hpp"
#include "liewalk/linalg.hpp"
#include "liewalk/rng.hpp"

namespace liewalk {

/// A point of SL(2,R)/SL(2,Z), stored as a concrete coset representative
/// whose columns form the canonical reduced basis of the lattice rep * Z^2.
/// The shape parameter z = (second column) / (first column), read as complex
/// numbers, lies in the standard fundamental domain
/// {|Re z| <= 1/2, |z| >= 1}; frame_angle is the direction of the first
/// basis vector (the residual rotation the shape parameter forgets).
struct LatticePoint {
  Mat rep;             // 2x2, det 1
  double frame_angle;  // atan2 of the first column

  std::complex<double> z() const;
};

/// Reduces g to the canonical representative of its coset g * SL(2,Z):
/// Gauss-style column reduction, sign-canonicalized so the first nonzero
/// entry (row-major scan) is positive.  Idempotent bit-for-bit; integer
/// inputs stay exactly integer.  Throws NotUnimodular when det g != 1.
LatticePoint reduce(const Mat& g);

/// Euclidean length of the shortest nonzero vector of rep * Z^2 by
/// exhaustive search over coefficients up to the condition-number bound.
/// A two-sidedly comparable proxy for the injectivity radius: it is the
/// lattice systole, and 2 * arcsinh(systole / 2) is the hyperbolic one.
double injectivity_proxy(const LatticePoint& x);

/// Samples from the invariant probability measure: the shape parameter by
/// rejection from dx dy / y^2 on the fundamental domain (acceptance rate
/// pi sqrt(3) / 6), the frame angle uniform.  Deterministic given seed.
std::vector<LatticePoint> haar_sample(std::int64_t count, std::uint64_t seed);

/// Throws BadMeasure / NotUnimodular unless mu has 2x2 atoms with det 1 and
/// positive weights summing to 1.
void validate_unimodular(const WalkMeasure& mu);

/// count independent samples of the n-step walk g_n ... g_1 * x0, reduced
/// after every step so integer-atom walks stay exactly integer.  Parallel
/// over samples with split seeds; deterministic given (seed, count, n).
std::vector<LatticePoint> walk_distribution(const WalkMeasure& mu,
                                            const LatticePoint& x0, int n,
                                            std::int64_t count,
                                            std::uint64_t seed,
                                            int threads = 1);

struct DiscrepancyReport {
  std::int64_t n_steps = -1;  // filled by walk experiments, -1 otherwise
  std::int64_t n_samples = 0;
  double value = 0.0;
  int dictionary_size = 0;
  double beta = 0.0;
};

/// Dictionary lower bound for the beta-Holder Wasserstein distance between
/// two empirical measures: the maximum of |mean_A f - mean_B f| over a fixed
/// seeded dictionary of test functions, each with Holder-beta seminorm <= 1
/// and range inside [0, 2] (capped hyperbolic distance functions, bump
/// functions on fundamental-domain cells, cusp-height functions, plus
/// frame-modulated bumps when use_frame is set).  Symmetric, zero on
/// identical samples, and a LOWER bound on the true distance by
/// construction.  Throws EmptySample.
DiscrepancyReport discrepancy(const std::vector<LatticePoint>& sample_a,
                              const std::vector<LatticePoint>& sample_b,
                              double beta, int dictionary_size,
                              std::uint64_t seed, bool use_frame = false);

/// Fraction of samples with injectivity_proxy below r (recurrence probe).
double inj_fraction_below(const std::vector<LatticePoint>& samples, double r);

/// Hyperbolic distance on the upper half plane.
double hyperbolic_dist(std::complex<double> z, std::complex<double> w);

}  // namespace liewalk
