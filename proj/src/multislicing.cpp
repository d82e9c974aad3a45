#include "liewalk/multislicing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "liewalk/errors.hpp"
#include "liewalk/util.hpp"

namespace liewalk {

int pixelize(double eta) {
  if (!(eta > 0.0) || eta > 1.0) throw InvalidEta("eta must lie in (0, 1]");
  int k = static_cast<int>(std::floor(-std::log2(eta)));
  if (k < 0) k = 0;
  if (k > kMaxLevel + 1) k = kMaxLevel + 1;
  while (k > 0 && eta > std::ldexp(1.0, -k)) --k;
  while (eta <= std::ldexp(1.0, -(k + 1))) ++k;
  if (k > kMaxLevel) throw InvalidEta("eta below the supported resolution 2^-40");
  return k;
}

PointCloud PointCloud::create(int dim, std::vector<Vec> points,
                              double separation) {
  if (dim < 1) throw ConfigError("point cloud dimension must be >= 1");
  PointCloud cloud;
  cloud.dim = dim;
  cloud.separation = separation;
  for (const Vec& p : points) {
    if (p.size() != dim) throw ConfigError("point with wrong dimension");
    for (int i = 0; i < dim; ++i)
      if (!(p(i) >= 0.0) || !(p(i) < 1.0))
        throw ConfigError("coordinates must lie in [0, 1)");
  }
  cloud.points = std::move(points);

  if (separation > 0.0) {
    if (cloud.size() > 100000)
      throw ConfigError("separation verification supports at most 1e5 points");
    // Grid hash with cell size = separation: any violating pair lives in
    // neighboring cells.
    std::map<CellKey, std::vector<int>> grid;
    for (int i = 0; i < cloud.size(); ++i) {
      CellKey key(dim);
      for (int c = 0; c < dim; ++c)
        key[c] = static_cast<std::int64_t>(std::floor(cloud.points[i](c) / separation));
      grid[key].push_back(i);
    }
    std::vector<CellKey> offsets;
    CellKey off(dim, -1);
    while (true) {
      offsets.push_back(off);
      int c = 0;
      while (c < dim && off[c] == 1) off[c++] = -1;
      if (c == dim) break;
      ++off[c];
    }
    for (const auto& [key, members] : grid) {
      for (const CellKey& o : offsets) {
        CellKey nb(dim);
        for (int c = 0; c < dim; ++c) nb[c] = key[c] + o[c];
        auto it = grid.find(nb);
        if (it == grid.end()) continue;
        for (int i : members)
          for (int j : it->second)
            if (i < j &&
                (cloud.points[i] - cloud.points[j]).norm() < separation - 1e-15)
              throw InvariantViolation("declared separation is violated");
      }
    }
  }
  return cloud;
}

PointCloud load_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open point cloud file: " + path);
  double separation = 0.0;
  int dim = 0;
  std::vector<Vec> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "separation:") hs >> separation;
      if (key == "dim:") hs >> dim;
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) row.push_back(std::stod(field));
    if (dim == 0) dim = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != dim)
      throw ConfigError("ragged row in point cloud file");
    Vec p(dim);
    for (int c = 0; c < dim; ++c) p(c) = row[c];
    pts.push_back(std::move(p));
  }
  if (dim == 0) throw ConfigError("empty point cloud file");
  return PointCloud::create(dim, std::move(pts), separation);
}

void save_point_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write point cloud file: " + path);
  char buf[64];
  out << "# dim: " << cloud.dim << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", cloud.separation);
  out << "# separation: " << buf << "\n";
  for (const Vec& p : cloud.points) {
    for (int c = 0; c < cloud.dim; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", p(c));
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

CellKey cell_key(const Vec& x, int level) {
  CellKey key(x.size());
  for (int c = 0; c < x.size(); ++c)
    key[c] = static_cast<std::int64_t>(std::floor(std::ldexp(x(c), level)));
  return key;
}

std::int64_t count_cells(const std::vector<Vec>& coords, int level) {
  std::set<CellKey> cells;
  for (const Vec& x : coords) cells.insert(cell_key(x, level));
  return static_cast<std::int64_t>(cells.size());
}

std::int64_t covering_number(const PointCloud& A, double delta) {
  if (!(delta > 0.0)) throw InvalidEta("delta must be positive");
  if (A.empty()) return 0;
  return count_cells(A.points, pixelize(std::min(delta, 1.0)));
}

std::int64_t covering_number_box(const PointCloud& A, const Flag& flag,
                                 const std::vector<double>& r, double delta) {
  flag.validate();
  if (flag.spaces.back().ambient_dim() != A.dim && !A.empty())
    throw AmbientMismatch("flag ambient dimension does not match the cloud");
  if (r.size() != flag.spaces.size())
    throw BadExponents("one exponent per flag space required");
  if (!(delta > 0.0) || delta >= 1.0)
    throw BadExponents("delta must lie in (0, 1)");
  std::vector<double> widths;
  for (double ri : r) {
    if (!(ri > 0.0) || ri > 1.0) throw BadExponents("exponents must lie in (0, 1]");
    const double w = std::pow(delta, ri);
    if (w < std::ldexp(1.0, -kMaxLevel))
      throw BadExponents("tile width below the supported resolution");
    widths.push_back(w);
  }
  if (A.empty()) return 0;

  const std::vector<Mat> blocks = flag.increment_frames();
  std::set<CellKey> tiles;
  for (const Vec& p : A.points) {
    CellKey key;
    for (size_t b = 0; b < blocks.size(); ++b) {
      const Vec c = blocks[b].transpose() * p;
      for (int i = 0; i < c.size(); ++i)
        key.push_back(static_cast<std::int64_t>(std::floor(c(i) / widths[b])));
    }
    tiles.insert(key);
  }
  return static_cast<std::int64_t>(tiles.size());
}

namespace {

CellKey ancestor(const CellKey& fine, int fine_level, int coarse_level) {
  CellKey out(fine.size());
  for (size_t c = 0; c < fine.size(); ++c)
    out[c] = fine[c] >> (fine_level - coarse_level);
  return out;
}

}  // namespace

RegularizeResult regularize(const PointCloud& A, const std::vector<int>& levels,
                            double eps) {
  if (levels.empty()) throw LevelMismatch("need at least one level");
  for (size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0 || levels[i] > kMaxLevel)
      throw LevelMismatch("levels must lie in [0, 40]");
    if (i > 0 && levels[i] <= levels[i - 1])
      throw LevelMismatch("levels must be strictly increasing");
  }
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");

  RegularizeResult res;
  res.levels = levels;
  res.eps = eps;
  res.bad.dim = A.dim;

  if (A.empty()) return res;
  const int L = levels.back();
  const std::int64_t N = A.size();

  // Fine cells, lexicographically ordered keys.
  std::map<CellKey, std::vector<int>> fine;
  for (int i = 0; i < N; ++i) fine[cell_key(A.points[i], L)].push_back(i);
  std::vector<const std::pair<const CellKey, std::vector<int>>*> cells;
  for (const auto& kv : fine) cells.push_back(&kv);

  // Dyadic mass bins: 2^{-j-1} < count/N <= 2^{-j}.
  std::map<int, std::vector<int>> bins;  // bin j -> cell ids
  for (size_t id = 0; id < cells.size(); ++id) {
    const std::int64_t cnt = static_cast<std::int64_t>(cells[id]->second.size());
    int j = 0;
    while (cnt << (j + 1) <= N) ++j;  // largest j with cnt * 2^j <= N
    if ((cnt << j) > N) j = 0;        // cnt > N/2 -> bin 0
    bins[j].push_back(static_cast<int>(id));
  }

  // Drop bins of total mass <= delta^eps / (2 * #bins); total dropped mass
  // is then at most delta^eps / 2.
  const double delta_eps = std::pow(std::ldexp(1.0, -L), eps);
  const double threshold = delta_eps / (2.0 * static_cast<double>(bins.size()));
  std::vector<std::vector<int>> kept_bins;
  for (const auto& [j, ids] : bins) {
    std::int64_t mass = 0;
    for (int id : ids) mass += static_cast<std::int64_t>(cells[id]->second.size());
    if (static_cast<double>(mass) <= threshold * static_cast<double>(N)) {
      for (int id : ids)
        for (int p : cells[id]->second) res.bad.points.push_back(A.points[p]);
    } else {
      kept_bins.push_back(ids);
    }
  }

  // Split every bin at each level transition, finest transition first:
  // group the coarse cells of a piece by how many next-level cells of the
  // piece they contain; keeping whole subtrees preserves the regularity of
  // all finer transitions.
  const int b = static_cast<int>(levels.size());
  for (const std::vector<int>& bin_cells : kept_bins) {
    std::vector<std::vector<int>> pieces = {bin_cells};
    for (int ti = b - 2; ti >= 0; --ti) {
      const int coarse = levels[ti];
      const int mid = levels[ti + 1];
      std::vector<std::vector<int>> next;
      for (const std::vector<int>& piece : pieces) {
        // coarse cell -> set of mid-level cells of the piece inside it
        std::map<CellKey, std::set<CellKey>> mid_inside;
        std::map<CellKey, std::vector<int>> members;
        for (int id : piece) {
          const CellKey ck = ancestor(cells[id]->first, L, coarse);
          mid_inside[ck].insert(ancestor(cells[id]->first, L, mid));
          members[ck].push_back(id);
        }
        // Group coarse cells by subcell count; order groups by count
        // descending, ties by the lexicographically smallest coarse key.
        std::map<std::int64_t, std::pair<CellKey, std::vector<int>>> by_count;
        for (const auto& [ck, mids] : mid_inside) {
          const std::int64_t cnt = static_cast<std::int64_t>(mids.size());
          auto it = by_count.find(cnt);
          if (it == by_count.end())
            by_count[cnt] = {ck, members[ck]};
          else {
            auto& [first_key, ids] = it->second;
            if (ck < first_key) first_key = ck;
            ids.insert(ids.end(), members[ck].begin(), members[ck].end());
          }
        }
        std::vector<std::pair<std::int64_t, std::pair<CellKey, std::vector<int>>>>
            ordered(by_count.begin(), by_count.end());
        std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
          if (x.first != y.first) return x.first > y.first;  // count descending
          return x.second.first < y.second.first;            // lex smallest key
        });
        for (auto& [cnt, key_ids] : ordered) {
          std::sort(key_ids.second.begin(), key_ids.second.end());
          next.push_back(std::move(key_ids.second));
        }
      }
      pieces = std::move(next);
    }
    for (const std::vector<int>& piece : pieces) {
      PointCloud pc;
      pc.dim = A.dim;
      for (int id : piece)
        for (int p : cells[id]->second) pc.points.push_back(A.points[p]);
      res.pieces.push_back(std::move(pc));
    }
  }
  return res;
}

bool piece_is_regular(const PointCloud& piece, const std::vector<int>& levels) {
  if (piece.empty()) return true;
  const int L = levels.back();
  std::set<CellKey> fine;
  for (const Vec& p : piece.points) fine.insert(cell_key(p, L));
  for (size_t i = 0; i < levels.size(); ++i) {
    for (size_t j = i + 1; j < levels.size(); ++j) {
      std::map<CellKey, std::set<CellKey>> inside;
      for (const CellKey& f : fine)
        inside[ancestor(f, L, levels[i])].insert(ancestor(f, L, levels[j]));
      std::int64_t total_j = 0;
      for (const auto& [q, s] : inside) total_j += static_cast<std::int64_t>(s.size());
      const std::int64_t n_i = static_cast<std::int64_t>(inside.size());
      if (total_j % n_i != 0) return false;
      const std::int64_t expected = total_j / n_i;
      for (const auto& [q, s] : inside)
        if (static_cast<std::int64_t>(s.size()) != expected) return false;
    }
  }
  return true;
}

bool piece_mass_balanced(const PointCloud& piece, int fine_level) {
  if (piece.empty()) return true;
  std::map<CellKey, std::int64_t> counts;
  for (const Vec& p : piece.points) ++counts[cell_key(p, fine_level)];
  const std::int64_t total = piece.size();
  const std::int64_t ncells = static_cast<std::int64_t>(counts.size());
  for (const auto& [key, c] : counts) {
    if (2 * c * ncells < total) return false;
    if (c * ncells > 2 * total) return false;
  }
  return true;
}

namespace {

double unit_ball_volume(int dim) {
  return std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

}  // namespace

RobustWitness robust_decompose(const PointCloud& A,
                               const std::vector<std::int64_t>& masses,
                               double alpha,
                               const std::vector<double>& radius_grid,
                               double tau) {
  const int n = static_cast<int>(A.size());
  if (static_cast<int>(masses.size()) != n)
    throw ConfigError("one mass per point required");
  if (n > 4096) throw ConfigError("robust_decompose supports at most 4096 points");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (radius_grid.empty()) throw ConfigError("need a non-empty radius grid");
  if (tau < 0.0) throw ConfigError("tau must be non-negative");
  std::int64_t M = 0;
  for (std::int64_t m : masses) {
    if (m < 0) throw ConfigError("masses must be non-negative");
    M += m;
  }
  RobustWitness w;
  w.alpha = alpha;
  w.tau = tau;
  w.radii = radius_grid;
  std::sort(w.radii.begin(), w.radii.end());
  if (M == 0) return w;

  const double vd = unit_ball_volume(A.dim);
  struct Ball {
    int center;
    double radius;
    double allowed;          // M * leb(B)^alpha
    std::vector<int> members;
    std::int64_t nu1_mass;
  };
  std::vector<Ball> balls;
  std::vector<std::vector<int>> point_balls(n);
  for (int c = 0; c < n; ++c) {
    for (double r : w.radii) {
      if (!(r > 0.0)) throw ConfigError("radii must be positive");
      Ball b;
      b.center = c;
      b.radius = r;
      const double leb = std::min(1.0, vd * std::pow(r, A.dim));
      b.allowed = static_cast<double>(M) * std::pow(leb, alpha);
      b.nu1_mass = 0;
      for (int i = 0; i < n; ++i)
        if ((A.points[i] - A.points[c]).norm() <= r) {
          b.members.push_back(i);
          b.nu1_mass += masses[i];
        }
      point_balls[c].push_back(static_cast<int>(balls.size()));
      balls.push_back(std::move(b));
    }
  }
  // point -> balls containing it
  for (auto& pb : point_balls) pb.clear();
  for (size_t bi = 0; bi < balls.size(); ++bi)
    for (int m : balls[bi].members) point_balls[m].push_back(static_cast<int>(bi));

  std::vector<bool> in_nu1(n, true);
  std::int64_t nu2_mass = 0;

  auto move_to_nu2 = [&](int p) {
    in_nu1[p] = false;
    nu2_mass += masses[p];
    for (int bi : point_balls[p]) balls[bi].nu1_mass -= masses[p];
  };

  while (true) {
    // Worst violator by ratio nu1(B) / allowed; deterministic scan order.
    int worst = -1;
    double worst_ratio = 1.0;
    for (size_t bi = 0; bi < balls.size(); ++bi) {
      if (balls[bi].allowed <= 0.0) {
        if (balls[bi].nu1_mass > 0 && worst < 0) worst = static_cast<int>(bi);
        continue;
      }
      const double ratio = static_cast<double>(balls[bi].nu1_mass) / balls[bi].allowed;
      if (ratio > worst_ratio + 1e-12) {
        worst_ratio = ratio;
        worst = static_cast<int>(bi);
      }
    }
    if (worst < 0) break;

    Ball& b = balls[worst];
    // Move the heaviest nu1 points of the ball until it satisfies the bound.
    std::vector<int> movable;
    for (int m : b.members)
      if (in_nu1[m] && masses[m] > 0) movable.push_back(m);
    std::sort(movable.begin(), movable.end(), [&](int x, int y) {
      if (masses[x] != masses[y]) return masses[x] > masses[y];
      return x < y;
    });
    for (int m : movable) {
      if (static_cast<double>(b.nu1_mass) <= b.allowed) break;
      move_to_nu2(m);
      if (static_cast<double>(nu2_mass) > tau * static_cast<double>(M) + 1e-12)
        throw Infeasible("remainder mass exceeds tau under the greedy strategy");
    }
  }

  for (int i = 0; i < n; ++i)
    (in_nu1[i] ? w.nu1_indices : w.nu2_indices).push_back(i);
  if (!verify_robust_witness(A, masses, w))
    throw InvariantViolation("constructed witness failed re-verification");
  return w;
}

bool verify_robust_witness(const PointCloud& A,
                           const std::vector<std::int64_t>& masses,
                           const RobustWitness& witness) {
  const int n = static_cast<int>(A.size());
  std::vector<bool> in_nu1(n, false);
  std::int64_t M = 0, nu2 = 0;
  for (std::int64_t m : masses) M += m;
  for (int i : witness.nu1_indices) in_nu1[i] = true;
  for (int i : witness.nu2_indices) nu2 += masses[i];
  if (static_cast<double>(nu2) > witness.tau * static_cast<double>(M) + 1e-9)
    return false;
  const double vd = unit_ball_volume(A.dim);
  for (int c = 0; c < n; ++c) {
    for (double r : witness.radii) {
      std::int64_t inside = 0;
      for (int i = 0; i < n; ++i)
        if (in_nu1[i] && (A.points[i] - A.points[c]).norm() <= r) inside += masses[i];
      const double leb = std::min(1.0, vd * std::pow(r, A.dim));
      if (static_cast<double>(inside) >
          static_cast<double>(M) * std::pow(leb, witness.alpha) + 1e-9)
        return false;
    }
  }
  return true;
}

double chernoff_bound(double p, double t, int J) {
  if (!(p > 0.0) || p >= 1.0 || !(t > 0.0) || t >= 1.0 || J < 1)
    throw ConfigError("need p, t in (0, 1) and J >= 1");
  if (t <= p) return 1.0;  // trivial bound regime
  const double s = t * (1.0 - p) / (p * (1.0 - t));
  const double k = robust_ceil(t * static_cast<double>(J));
  return std::pow(s, -k) * std::pow(s * p + 1.0 - p, static_cast<double>(J));
}

VisualCheck visual_inequality_check(const PointCloud& A,
                                    const std::vector<Subspace>& projectors,
                                    const std::vector<double>& q, double delta,
                                    double alpha, double beta, int w_trials,
                                    std::uint64_t seed) {
  if (projectors.empty() || projectors.size() != q.size())
    throw ConfigError("need matching projectors and weights");
  const int D = A.dim;
  double dim_sum = 0.0, q_sum = 0.0;
  for (size_t j = 0; j < projectors.size(); ++j) {
    if (projectors[j].ambient_dim() != D)
      throw AmbientMismatch("projector ambient dimension mismatch");
    if (!(q[j] > 0.0)) throw ConfigError("weights must be positive");
    dim_sum += q[j] * projectors[j].dim();
    q_sum += q[j];
  }
  if (std::abs(dim_sum - D) > 1e-9)
    throw AmbientMismatch("weighted projector dimensions must sum to the ambient dimension");
  if (!(alpha > 0.0) || alpha >= 1.0) throw InvalidRho("alpha must lie in (0, 1)");
  if (beta < 0.0) throw ConfigError("beta must be non-negative");

  // Perceptivity pre-check on sampled W plus the structured candidates
  // L_j and L_j^perp: sum_j q_j max_{W' in B_alpha(W)} dim(L_j^perp cap W')
  // must stay below beta + dim W * sum_j q_j dim(L_j^perp) / D.
  Rng rng(seed, 0);
  std::vector<Subspace> candidates;
  for (int dim = 1; dim < D; ++dim)
    for (int t = 0; t < w_trials; ++t)
      candidates.push_back(Subspace::random(D, dim, rng));
  for (const Subspace& L : projectors) {
    if (L.dim() > 0 && L.dim() < D) {
      candidates.push_back(L);
      candidates.push_back(L.orthogonal_complement());
    }
  }
  double perp_weight = 0.0;  // sum_j q_j dim(L_j^perp) / D
  for (size_t j = 0; j < projectors.size(); ++j)
    perp_weight += q[j] * (D - projectors[j].dim()) / static_cast<double>(D);
  constexpr int kPerturbations = 8;
  for (const Subspace& W : candidates) {
    double lhsP = 0.0;
    for (size_t j = 0; j < projectors.size(); ++j) {
      const Subspace Lperp = projectors[j].orthogonal_complement();
      int best = intersect_dim(Lperp, W);
      for (int s = 0; s < kPerturbations; ++s)
        best = std::max(best, intersect_dim(Lperp, perturb_subspace(W, alpha, rng)));
      lhsP += q[j] * best;
    }
    const double rhsP = beta + W.dim() * perp_weight;
    if (lhsP > rhsP + 1e-9)
      throw NotPerceptive("sampled subspace violates the perceptivity inequality");
  }

  VisualCheck out;
  // Documented explicit constant; generous but fixed once and for all.
  out.constant = std::exp(D * (1.0 + q_sum)) * std::pow(1.0 + q_sum, beta / 2.0);
  for (size_t j = 0; j < projectors.size(); ++j)
    out.constant *=
        std::pow(static_cast<double>(std::max(q[j], 1e-12)),
                 -q[j] * projectors[j].dim() / 2.0);

  out.lhs = static_cast<double>(covering_number(A, delta));
  const int level = pixelize(std::min(delta, 1.0));
  double prod = 1.0;
  for (size_t j = 0; j < projectors.size(); ++j) {
    std::vector<Vec> proj;
    proj.reserve(A.points.size());
    for (const Vec& p : A.points) proj.push_back(projectors[j].frame().transpose() * p);
    prod *= std::pow(static_cast<double>(count_cells(proj, level)), q[j]);
  }
  out.rhs = out.constant * std::pow(delta, -beta) * std::pow(alpha, -D) * prod;
  out.holds = out.lhs <= out.rhs;
  return out;
}

double exceptional_set_estimate(const PointCloud& A,
                                const std::vector<Subspace>& sigma_samples,
                                double alpha, double eps, double tau,
                                double delta, ExceptionalMode mode,
                                int adversary_budget) {
  if (!(delta > 0.0) || delta >= 1.0) throw InvalidEta("delta must lie in (0, 1)");
  if (eps < 0.0 || tau < 0.0)
    throw BadExponents("exponents must be non-negative");
  if (alpha < 0.0) throw BadExponents("alpha must be non-negative");
  if (adversary_budget < 1) throw ConfigError("adversary budget must be >= 1");
  if (A.empty() || sigma_samples.empty()) return 0.0;

  const int level = pixelize(delta);
  const int D = A.dim;
  // Cell representatives: centroids (distortion bounded by the cell size).
  std::map<CellKey, std::pair<Vec, std::int64_t>> cells;
  for (const Vec& p : A.points) {
    auto [it, fresh] = cells.try_emplace(cell_key(p, level),
                                         std::pair{Vec::Zero(D).eval(), std::int64_t{0}});
    it->second.first += p;
    it->second.second += 1;
  }
  std::vector<Vec> reps;
  std::vector<std::int64_t> weights;  // cells, not points: each counts once
  for (auto& [key, acc] : cells) {
    reps.push_back(acc.first / static_cast<double>(acc.second));
    weights.push_back(1);
  }
  const double N = static_cast<double>(reps.size());

  int exceptional = 0;
  for (const Subspace& V : sigma_samples) {
    if (V.ambient_dim() != D) throw AmbientMismatch("sampled subspace dimension mismatch");
    const int k = V.dim();
    if (k <= 0 || k >= D)
      throw ConfigError("sampled subspaces must be nonzero and proper");

    const Mat frame = (mode == ExceptionalMode::BigO)
                          ? V.frame()
                          : V.orthogonal_complement().frame();
    const int codim = D - k;

    double threshold = 0.0, target = 0.0;
    switch (mode) {
      case ExceptionalMode::SubP:
        threshold = std::pow(delta, eps) * N;
        target = std::pow(delta, tau) * std::pow(N, codim / static_cast<double>(D));
        break;
      case ExceptionalMode::BigE:
        threshold = std::pow(delta, tau) * N;
        target = std::pow(delta, -alpha * codim - tau);
        break;
      case ExceptionalMode::BigO:
        threshold = std::pow(delta, eps) * N;
        target = std::pow(delta, -alpha * k - eps);
        break;
    }

    // Fibers: cells grouped by the projected tile they land in.
    std::map<CellKey, std::int64_t> fibers;
    for (size_t i = 0; i < reps.size(); ++i)
      fibers[cell_key(frame.transpose() * reps[i], level)] += weights[i];
    std::vector<std::pair<std::int64_t, CellKey>> ordered;
    for (const auto& [key, cnt] : fibers) ordered.push_back({cnt, key});
    std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });

    // Greedy adversary: largest fibers first.
    std::int64_t gathered = 0;
    int used = 0;
    bool member = false;
    for (const auto& [cnt, key] : ordered) {
      if (used == adversary_budget) break;
      gathered += cnt;
      ++used;
      if (static_cast<double>(gathered) >= threshold) {
        member = used < target;
        break;
      }
    }
    if (member) ++exceptional;
  }
  return static_cast<double>(exceptional) / static_cast<double>(sigma_samples.size());
}

}  // namespace liewalk
