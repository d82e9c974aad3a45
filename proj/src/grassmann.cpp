#include "liewalk/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "liewalk/errors.hpp"

namespace liewalk {

Subspace::Subspace(int ambient_dim) : ambient_dim_(ambient_dim) {
  if (ambient_dim < 1) throw AmbientMismatch("ambient dimension must be >= 1");
  frame_ = Mat(ambient_dim, 0);
}

Subspace Subspace::span_of(const Mat& vectors, double tol) {
  Subspace s(static_cast<int>(vectors.rows()));
  s.frame_ = orthonormal_columns(vectors, tol);
  return s;
}

Subspace Subspace::from_frame(const Mat& frame, double tol) {
  Subspace s(static_cast<int>(frame.rows()));
  if (frame.cols() > 0) {
    const Mat gram = frame.transpose() * frame;
    const double err =
        (gram - Mat::Identity(frame.cols(), frame.cols())).cwiseAbs().maxCoeff();
    if (err > 100 * tol)
      throw AmbientMismatch("frame columns are not orthonormal");
  }
  s.frame_ = frame;
  return s;
}

Subspace Subspace::random(int ambient_dim, int dim, Rng& rng) {
  if (dim < 0 || dim > ambient_dim)
    throw AmbientMismatch("requested dimension outside [0, ambient]");
  if (dim == 0) return Subspace(ambient_dim);
  for (;;) {
    Mat g(ambient_dim, dim);
    for (int i = 0; i < ambient_dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
    Subspace s = span_of(g);
    if (s.dim() == dim) return s;  // resample in the measure-zero degenerate case
  }
}

Subspace Subspace::orthogonal_complement(double tol) const {
  Subspace s(ambient_dim_);
  s.frame_ = complement_of_frame(frame_, ambient_dim_, tol);
  return s;
}

Vec Subspace::project(const Vec& x) const {
  if (x.size() != ambient_dim_) throw AmbientMismatch("vector size mismatch");
  if (dim() == 0) return Vec::Zero(ambient_dim_);
  return frame_ * (frame_.transpose() * x);
}

bool Subspace::contains(const Vec& x, double tol) const {
  const double nx = x.norm();
  if (nx == 0.0) return true;
  return (x - project(x)).norm() <= tol * nx;
}

namespace {

void check_same_ambient(const Subspace& V, const Subspace& W) {
  if (V.ambient_dim() != W.ambient_dim())
    throw AmbientMismatch("subspaces live in different ambient spaces");
}

}  // namespace

double angle(const Subspace& V, const Subspace& W) {
  check_same_ambient(V, W);
  if (V.dim() == 0 || W.dim() == 0) return 0.0;
  const Subspace& small = V.dim() <= W.dim() ? V : W;
  const Subspace& large = V.dim() <= W.dim() ? W : V;
  // Sines of the principal angles, read off the residual (Id - P_large)
  // F_small.  The residual keeps full relative accuracy near zero, where
  // sqrt(1 - cos^2) would lose half the digits and make the zero snap flaky.
  const Mat R = small.frame() -
                large.frame() * (large.frame().transpose() * small.frame());
  const Vec s = singular_values(R);
  double prod = 1.0;
  for (int i = 0; i < s.size(); ++i) {
    const double sine = std::min(1.0, s(i));
    if (sine <= kTol) return 0.0;
    prod *= sine;
  }
  return prod;
}

double dist_to(const Subspace& V, const Subspace& W) {
  check_same_ambient(V, W);
  if (V.dim() == 0) return 0.0;
  if (W.dim() == 0) return 1.0;
  // Largest singular value of (Id - P_W) F_V.
  const Mat R = V.frame() - W.frame() * (W.frame().transpose() * V.frame());
  const Vec s = singular_values(R);
  return std::min(1.0, s.size() > 0 ? s(0) : 0.0);
}

double grass_dist(const Subspace& V, const Subspace& W) {
  check_same_ambient(V, W);
  if (V.dim() != W.dim()) return 1.0;
  if (V.dim() == 0) return 0.0;
  return std::max(dist_to(V, W), dist_to(W, V));
}

int intersect_dim(const Subspace& V, const Subspace& W, double tol,
                  RankDecision* decision) {
  check_same_ambient(V, W);
  if (V.dim() == 0 || W.dim() == 0) {
    if (decision) *decision = RankDecision{0, std::numeric_limits<double>::infinity(), 0.0};
    return 0;
  }
  Mat cat(V.ambient_dim(), V.dim() + W.dim());
  cat << V.frame(), W.frame();
  const RankDecision d = numerical_rank(cat, tol);
  if (decision) *decision = d;
  return V.dim() + W.dim() - d.rank;
}

Subspace intersection(const Subspace& V, const Subspace& W, double tol) {
  check_same_ambient(V, W);
  if (V.dim() == 0 || W.dim() == 0) return Subspace(V.ambient_dim());
  // Kernel of [F_V | -F_W] gives coefficient pairs (a, b) with F_V a = F_W b.
  Mat cat(V.ambient_dim(), V.dim() + W.dim());
  cat << V.frame(), -W.frame();
  const Mat ker = nullspace(cat, tol);
  if (ker.cols() == 0) return Subspace(V.ambient_dim());
  const Mat vectors = V.frame() * ker.topRows(V.dim());
  return Subspace::span_of(vectors, tol);
}

Subspace sum(const Subspace& V, const Subspace& W, double tol) {
  check_same_ambient(V, W);
  Mat cat(V.ambient_dim(), V.dim() + W.dim());
  if (cat.cols() == 0) return Subspace(V.ambient_dim());
  cat << V.frame(), W.frame();
  return Subspace::span_of(cat, tol);
}

Subspace perturb_subspace(const Subspace& W, double rho, Rng& rng) {
  if (rho <= 0.0 || rho > 1.0) throw InvalidRho("rho must lie in (0, 1]");
  const int D = W.ambient_dim();
  if (W.dim() == 0 || W.dim() == D) return W;

  // Unit vector inside W.
  Vec cw(W.dim());
  for (int i = 0; i < cw.size(); ++i) cw(i) = rng.normal();
  if (cw.norm() == 0.0) cw(0) = 1.0;
  cw.normalize();
  const Vec w = W.frame() * cw;

  // Unit vector in the complement.
  const Subspace Wp = W.orthogonal_complement();
  Vec cq(Wp.dim());
  for (int i = 0; i < cq.size(); ++i) cq(i) = rng.normal();
  if (cq.norm() == 0.0) cq(0) = 1.0;
  cq.normalize();
  const Vec q = Wp.frame() * cq;

  const double u = rng.uniform(0.0, rho);
  // Rotation by u in the (w, q) plane.
  const Mat R = Mat::Identity(D, D) + std::sin(u) * (q * w.transpose() - w * q.transpose()) +
                (std::cos(u) - 1.0) * (w * w.transpose() + q * q.transpose());
  return Subspace::span_of(R * W.frame());
}

void Flag::validate(double tol) const {
  if (spaces.empty()) throw AmbientMismatch("flag has no spaces");
  const int D = spaces.front().ambient_dim();
  int prev_dim = 0;
  const Subspace* prev = nullptr;
  for (const Subspace& s : spaces) {
    if (s.ambient_dim() != D) throw AmbientMismatch("flag spaces in different ambients");
    if (s.dim() <= prev_dim) throw AmbientMismatch("flag dimensions must strictly increase");
    if (prev != nullptr && dist_to(*prev, s) > 100 * tol)
      throw AmbientMismatch("flag spaces are not nested");
    prev_dim = s.dim();
    prev = &s;
  }
  if (spaces.back().dim() != D)
    throw AmbientMismatch("flag must terminate at the full space");
}

std::vector<int> Flag::jumps() const {
  std::vector<int> j;
  int prev = 0;
  for (const Subspace& s : spaces) {
    j.push_back(s.dim() - prev);
    prev = s.dim();
  }
  return j;
}

std::vector<Mat> Flag::increment_frames(double tol) const {
  std::vector<Mat> frames;
  frames.reserve(spaces.size());
  const int D = spaces.front().ambient_dim();
  Mat prev(D, 0);
  for (const Subspace& s : spaces) {
    // Project out the previous space and orthonormalize what remains.
    Mat f = s.frame();
    if (prev.cols() > 0) f = f - prev * (prev.transpose() * f);
    const Mat inc = orthonormal_columns(f, tol);
    frames.push_back(inc);
    Mat next(D, prev.cols() + inc.cols());
    next << prev, inc;
    prev = next;
  }
  return frames;
}

bool pencil_membership(const Subspace& L, const Subspace& W, double rho,
                       int trials, Rng& rng, double tol) {
  if (L.ambient_dim() != W.ambient_dim())
    throw AmbientMismatch("pencil test needs a common ambient space");
  if (rho <= 0.0 || rho > 1.0) throw InvalidRho("rho must lie in (0, 1]");
  const int D = L.ambient_dim();
  if (L.dim() == 0 || W.dim() == 0) return false;
  const Subspace Lperp = L.orthogonal_complement();

  auto shadow_is_small = [&](const Subspace& Wp) {
    const int proj_dim = Wp.dim() - intersect_dim(Wp, Lperp, tol);
    // dim(pi_L W') < (dim L / D) * dim W, as integers: proj_dim * D < dimL * dimW.
    return static_cast<long>(proj_dim) * D <
           static_cast<long>(L.dim()) * W.dim();
  };

  if (shadow_is_small(W)) return true;
  for (int t = 0; t < trials; ++t) {
    if (shadow_is_small(perturb_subspace(W, rho, rng))) return true;
  }
  return false;
}

bool box_membership(const Vec& x, const Vec& center, const Flag& flag,
                    const std::vector<double>& r, double delta) {
  flag.validate();
  const int D = flag.spaces.front().ambient_dim();
  if (x.size() != D || center.size() != D)
    throw AmbientMismatch("point dimension does not match the flag");
  const std::vector<Mat> incs = flag.increment_frames();
  if (r.size() != incs.size())
    throw BadExponents("need one exponent per flag increment");
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0.0 || r[i] > 1.0) throw BadExponents("exponents must lie in (0,1]");
    if (i > 0 && r[i] <= r[i - 1]) throw BadExponents("exponents must strictly increase");
  }
  if (delta <= 0.0 || delta >= 1.0) throw BadExponents("delta must lie in (0,1)");

  const Vec u = x - center;
  const double slack = static_cast<double>(incs.size());
  for (size_t i = 0; i < incs.size(); ++i) {
    if (incs[i].cols() == 0) continue;
    const double block_norm = (incs[i].transpose() * u).norm();
    if (block_norm > slack * std::pow(delta, r[i])) return false;
  }
  return true;
}

}  // namespace liewalk
