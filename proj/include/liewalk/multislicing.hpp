#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "liewalk/grassmann.hpp"
#include "liewalk/linalg.hpp"
#include "liewalk/rng.hpp"

namespace liewalk {

/// Finest supported dyadic level: floor divisions stay exact in doubles.
inline constexpr int kMaxLevel = 40;

/// The dyadic level k with 2^{-k-1} < eta <= 2^{-k}.  Throws InvalidEta for
/// eta outside (0, 1] or below the supported resolution.
int pixelize(double eta);

/// A finite subset of [0,1)^D with an optional declared minimum pairwise
/// distance (0 = unknown; verified on construction when declared).
struct PointCloud {
  int dim = 0;
  std::vector<Vec> points;
  double separation = 0.0;

  static PointCloud create(int dim, std::vector<Vec> points,
                           double separation = 0.0);
  std::int64_t size() const { return static_cast<std::int64_t>(points.size()); }
  bool empty() const { return points.empty(); }
};

/// CSV round trip: one row per point, 17-significant-digit decimals, a
/// '#'-comment header carrying dim and separation.
PointCloud load_point_cloud(const std::string& path);
void save_point_cloud(const PointCloud& cloud, const std::string& path);

using CellKey = std::vector<std::int64_t>;

/// Dyadic cell of x at the given level: floor(x_i * 2^level) per coordinate.
CellKey cell_key(const Vec& x, int level);

/// Number of distinct dyadic cells at `level` hit by the coordinate rows
/// (no range restriction; used for projected clouds too).
std::int64_t count_cells(const std::vector<Vec>& coords, int level);

/// Covering-number proxy: occupied dyadic cells at level pixelize(delta).
/// Two-sidedly equivalent to the ball covering number up to a factor 3^D.
std::int64_t covering_number(const PointCloud& A, double delta);

/// Count of distinct flag-aligned tiles: in every increment block of the
/// flag the tile width is delta^{r_i}.  Exponents must lie in (0, 1]; with a
/// single jump and dyadic delta this is exactly covering_number.
std::int64_t covering_number_box(const PointCloud& A, const Flag& flag,
                                 const std::vector<double>& r, double delta);

/// Output of the mass-regularization procedure: pieces that branch uniformly
/// across every pair of the level filtration, plus a small discarded part.
struct RegularizeResult {
  std::vector<PointCloud> pieces;
  PointCloud bad;
  std::vector<int> levels;
  double eps = 0.0;
};

/// Splits A into pieces that are exactly regular for the dyadic filtration:
/// cells are first binned by dyadic mass (bins of total mass below
/// delta^eps / (2 * #bins) are discarded into `bad`, so the bad mass is at
/// most delta^eps / 2 with delta = 2^{-levels.back()}); each bin is then
/// split at every level transition, finest first, grouping coarse cells by
/// their exact subcell count.  Deterministic: groups ordered by (count
/// descending, lexicographically smallest cell key), bins by mass descending.
RegularizeResult regularize(const PointCloud& A, const std::vector<int>& levels,
                            double eps);

/// Exact integer check: for every pair of levels (coarse, fine) and every
/// coarse cell Q meeting the piece, the number of fine cells inside Q equals
/// N_fine(piece) / N_coarse(piece).
bool piece_is_regular(const PointCloud& piece, const std::vector<int>& levels);

/// Exact integer check of the factor-2 bullets: every fine cell of the piece
/// carries between half and twice the average per-cell mass.
bool piece_mass_balanced(const PointCloud& piece, int fine_level);

/// Greedy decomposition of a weighted cloud into nu_1 (ball-regular part:
/// nu_1(B) <= leb(B)^alpha on every tested ball) and nu_2 (remainder of mass
/// at most tau * total).
struct RobustWitness {
  std::vector<int> nu1_indices;
  std::vector<int> nu2_indices;
  double alpha = 0.0;
  double tau = 0.0;
  std::vector<double> radii;
};

RobustWitness robust_decompose(const PointCloud& A,
                               const std::vector<std::int64_t>& masses,
                               double alpha,
                               const std::vector<double>& radius_grid,
                               double tau);

/// Independent re-verification of a witness (exact integer mass sums).
bool verify_robust_witness(const PointCloud& A,
                           const std::vector<std::int64_t>& masses,
                           const RobustWitness& witness);

/// Upper tail bound for Bin(J, p) at level t*J:  s^{-ceil(tJ)} (sp + 1 - p)^J
/// with s = t(1-p)/(p(1-t)); returns the trivial bound 1 when t <= p.
double chernoff_bound(double p, double t, int J);

/// Both sides of the covering-number product inequality
///   N_delta(A) <= C * delta^{-beta} * alpha^{-D} * prod_j N_delta(pi_{L_j} A)^{q_j}
/// for a perceptive family of projections.  The constant C is this library's
/// documented explicit choice (see the implementation), not a sharp one.
struct VisualCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double constant = 0.0;
};

VisualCheck visual_inequality_check(const PointCloud& A,
                                    const std::vector<Subspace>& projectors,
                                    const std::vector<double>& q, double delta,
                                    double alpha, double beta, int w_trials,
                                    std::uint64_t seed);

/// Which exceptional family a subspace is tested against:
///  - SubP: projections parallel to V drop below delta^tau * N^{dim(V~perp)/D}
///    for some subset holding a delta^eps fraction of the cells;
///  - BigE: parallel projections below delta^{-alpha dim(V~perp) - tau} for a
///    subset holding a delta^tau fraction;
///  - BigO: projections onto V below delta^{-alpha dim(V) - eps} for a subset
///    holding a delta^eps fraction.
enum class ExceptionalMode { SubP, BigE, BigO };

/// Fraction of the sampled subspaces found exceptional by a greedy adversary
/// that assembles A' from the largest projected-tile fibers (at most
/// adversary_budget of them).  The universal quantifier over subsets is
/// relaxed, so this is a LOWER bound on the true exceptional measure.
double exceptional_set_estimate(const PointCloud& A,
                                const std::vector<Subspace>& sigma_samples,
                                double alpha, double eps, double tau,
                                double delta, ExceptionalMode mode,
                                int adversary_budget);

}  // namespace liewalk
