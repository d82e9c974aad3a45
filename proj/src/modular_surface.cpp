#include "liewalk/modular_surface.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "liewalk/errors.hpp"
#include "liewalk/util.hpp"

namespace liewalk {

namespace {

using cplx = std::complex<double>;

// Columns of a 2x2 matrix as complex numbers; the shape parameter is their
// ratio, which right multiplication by SL(2,Z) moves by the full modular
// group, so Gauss reduction of the column basis lands it in the standard
// fundamental domain.
cplx column(const Mat& m, int j) { return {m(0, j), m(1, j)}; }

cplx shape_of(const Mat& m) { return column(m, 1) / column(m, 0); }

// First entry with |e| > 1e-9 in row-major order must be positive; flipping
// the sign stays inside the coset (-Id is integral).
bool needs_sign_flip(const Mat& m) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (std::abs(m(i, j)) <= 1e-9) continue;
      return m(i, j) < 0.0;
    }
  return false;
}

}  // namespace

std::complex<double> LatticePoint::z() const { return shape_of(rep); }

double hyperbolic_dist(cplx z, cplx w) {
  const double num = std::norm(z - w);
  return std::acosh(1.0 + num / (2.0 * z.imag() * w.imag()));
}

LatticePoint reduce(const Mat& g) {
  if (g.rows() != 2 || g.cols() != 2)
    throw NotUnimodular("expected a 2x2 matrix");
  const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (!(std::abs(det - 1.0) <= 1e-9 * scale * scale))
    throw NotUnimodular("matrix must have determinant 1");

  Mat m = g;
  // Column operations over the integers: col2 -= n * col1 translates the
  // shape parameter by -n, swapping (col1, col2) -> (col2, -col1) inverts it.
  for (int iter = 0; iter < 256; ++iter) {
    const cplx z = shape_of(m);
    double n = std::floor(z.real() + 0.5);
    if (z.real() - n <= -0.5) n -= 1.0;  // land in (-1/2, 1/2]
    if (n != 0.0) m.col(1) -= n * m.col(0);
    const double az = std::abs(shape_of(m));
    if (az >= 1.0 - 1e-15) {
      // Boundary of the unit circle: canonicalize Re z >= 0 there.
      if (az <= 1.0 + 1e-12 && shape_of(m).real() < -1e-15) {
        const Vec c0 = m.col(0);
        m.col(0) = m.col(1);
        m.col(1) = -c0;
        continue;
      }
      break;
    }
    const Vec c0 = m.col(0);
    m.col(0) = m.col(1);
    m.col(1) = -c0;
  }
  if (needs_sign_flip(m)) m = -m;

  LatticePoint x;
  x.rep = m;
  x.frame_angle = std::atan2(m(1, 0), m(0, 0));
  return x;
}

double injectivity_proxy(const LatticePoint& x) {
  Eigen::JacobiSVD<Mat> svd(x.rep);
  const double smin = svd.singularValues()(1);
  if (!(smin > 0.0)) throw NotUnimodular("degenerate lattice basis");
  // Any vector shorter than the current best has coefficients bounded by
  // best / smin, since |a v1 + b v2| >= smin * |(a, b)|.
  double best = std::min(x.rep.col(0).norm(), x.rep.col(1).norm());
  const long bound = std::lround(std::ceil(best / smin)) + 1;
  for (long a = -bound; a <= bound; ++a)
    for (long b = -bound; b <= bound; ++b) {
      if (a == 0 && b == 0) continue;
      const double len = (static_cast<double>(a) * x.rep.col(0) +
                          static_cast<double>(b) * x.rep.col(1))
                             .norm();
      best = std::min(best, len);
    }
  return best;
}

std::vector<LatticePoint> haar_sample(std::int64_t count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("count must be >= 1");
  std::vector<LatticePoint> out(count);
  for (std::int64_t i = 0; i < count; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    double xr = 0.0, yr = 0.0;
    while (true) {
      xr = rng.uniform(-0.5, 0.5);
      double u = rng.uniform01();
      if (u <= 0.0) continue;
      yr = (std::sqrt(3.0) / 2.0) / u;  // density 1/y^2 above sqrt(3)/2
      if (xr * xr + yr * yr >= 1.0) break;
    }
    const double phi = rng.uniform(-M_PI / 2.0, M_PI / 2.0);
    const double sy = std::sqrt(yr);
    Mat m(2, 2);
    m << 1.0 / sy, xr / sy, 0.0, sy;
    Mat rot(2, 2);
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    out[i] = reduce(rot * m);
  }
  return out;
}

void validate_unimodular(const WalkMeasure& mu) {
  if (mu.atoms.empty() || mu.atoms.size() != mu.weights.size())
    throw BadMeasure("need matching non-empty atoms and weights");
  double total = 0.0;
  for (double w : mu.weights) {
    if (!(w >= 0.0)) throw BadMeasure("weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw BadMeasure("weights must sum to 1");
  for (const Mat& a : mu.atoms) {
    if (a.rows() != 2 || a.cols() != 2)
      throw NotUnimodular("atoms must be 2x2");
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    if (std::abs(det - 1.0) > 1e-9)
      throw NotUnimodular("atoms must have determinant 1");
  }
}

std::vector<LatticePoint> walk_distribution(const WalkMeasure& mu,
                                            const LatticePoint& x0, int n,
                                            std::int64_t count,
                                            std::uint64_t seed, int threads) {
  validate_unimodular(mu);
  if (n < 0) throw ConfigError("step count must be >= 0");
  if (count < 1) throw ConfigError("count must be >= 1");
  std::vector<LatticePoint> out(count);
  parallel_for(count, threads, [&](std::int64_t t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    LatticePoint x = x0;
    for (int k = 0; k < n; ++k)
      x = reduce(mu.atoms[mu.sample_index(rng)] * x.rep);
    out[t] = x;
  });
  return out;
}

namespace {

// Dictionary entries evaluate on the shape parameter (and optionally the
// frame angle).  Every entry keeps its Holder-beta seminorm at most 1 and
// its values in [0, 2], so any dictionary maximum is a valid lower bound
// for the Wasserstein-style distance and never exceeds 2.
struct TestFn {
  enum Kind { CappedDist, Bump, Cusp, FrameBump } kind;
  cplx center;
  double radius = 1.0;
  double s = 1.0;       // cusp exponent
  double phase = 0.0;   // frame modulation phase
  double norm = 1.0;    // precomputed normalization factor

  double eval(const LatticePoint& x, double beta) const {
    const cplx z = x.z();
    switch (kind) {
      case CappedDist:
        return std::min(2.0, std::pow(hyperbolic_dist(z, center), beta));
      case Bump: {
        const double d = hyperbolic_dist(z, center);
        return norm * std::max(0.0, 1.0 - std::pow(d / radius, beta));
      }
      case Cusp:
        // (y0 / y)^s with y0 = sqrt(3)/2, so values lie in (0, 1];
        // hyperbolic gradient is s * value <= s.
        return norm * std::pow(std::sqrt(3.0) / 2.0 / z.imag(), s);
      case FrameBump: {
        const double d = hyperbolic_dist(z, center);
        const double bump = std::max(0.0, 1.0 - std::pow(d / radius, beta));
        return norm * bump * 0.5 * (1.0 + std::cos(2.0 * x.frame_angle + phase));
      }
    }
    return 0.0;
  }
};

std::vector<TestFn> build_dictionary(double beta, int size, std::uint64_t seed,
                                     bool use_frame) {
  const cplx corner_i(0.0, 1.0);
  const cplx corner_rho(0.5, std::sqrt(3.0) / 2.0);
  std::vector<TestFn> dict;
  auto bump_norm = [beta](double r) { return 1.0 / (1.0 + std::pow(r, -beta)); };

  dict.push_back({TestFn::CappedDist, corner_i});
  dict.push_back({TestFn::CappedDist, corner_rho});
  TestFn b1{TestFn::Bump, corner_i};
  b1.radius = 0.5;
  b1.norm = bump_norm(0.5);
  dict.push_back(b1);
  TestFn b2{TestFn::Bump, corner_rho};
  b2.radius = 0.5;
  b2.norm = bump_norm(0.5);
  dict.push_back(b2);
  for (double s : {0.5, 1.0, 2.0}) {
    TestFn c{TestFn::Cusp, corner_i};
    c.s = s;
    // sup = 1 and Lipschitz constant s in the hyperbolic metric; a bounded
    // L-Lipschitz function has beta-Holder constant at most 2^(1-beta) L^beta.
    c.norm = 1.0 / (1.0 + 2.0 * std::max(1.0, s));
    dict.push_back(c);
  }

  // Random centers, haar-distributed, with cycling radii; frame-modulated
  // copies interleaved when requested.
  Rng rng(seed, 0x5eedu);
  const double radii[3] = {0.25, 0.5, 1.0};
  int idx = 0;
  while (static_cast<int>(dict.size()) < size) {
    double xr = rng.uniform(-0.5, 0.5);
    double u = rng.uniform01();
    if (u <= 0.0) continue;
    double yr = (std::sqrt(3.0) / 2.0) / u;
    if (xr * xr + yr * yr < 1.0) continue;
    const cplx c(xr, yr);
    const double r = radii[idx % 3];
    if (use_frame && idx % 2 == 1) {
      TestFn f{TestFn::FrameBump, c};
      f.radius = r;
      f.phase = rng.uniform(0.0, 2.0 * M_PI);
      // Extra factor 1/2 pays for the frame modulation's own variation.
      f.norm = 0.5 * bump_norm(r);
      dict.push_back(f);
    } else if (idx % 4 == 3) {
      dict.push_back({TestFn::CappedDist, c});
    } else {
      TestFn f{TestFn::Bump, c};
      f.radius = r;
      f.norm = bump_norm(r);
      dict.push_back(f);
    }
    ++idx;
  }
  dict.resize(std::min<size_t>(dict.size(), static_cast<size_t>(size)));
  return dict;
}

}  // namespace

DiscrepancyReport discrepancy(const std::vector<LatticePoint>& sample_a,
                              const std::vector<LatticePoint>& sample_b,
                              double beta, int dictionary_size,
                              std::uint64_t seed, bool use_frame) {
  if (sample_a.empty() || sample_b.empty())
    throw EmptySample("discrepancy needs two non-empty samples");
  if (!(beta > 0.0) || beta > 1.0)
    throw ConfigError("beta must lie in (0, 1]");
  if (dictionary_size < 1) throw ConfigError("dictionary size must be >= 1");

  const std::vector<TestFn> dict =
      build_dictionary(beta, dictionary_size, seed, use_frame);
  double value = 0.0;
  for (const TestFn& f : dict) {
    double ma = 0.0, mb = 0.0;
    for (const LatticePoint& x : sample_a) ma += f.eval(x, beta);
    for (const LatticePoint& x : sample_b) mb += f.eval(x, beta);
    ma /= static_cast<double>(sample_a.size());
    mb /= static_cast<double>(sample_b.size());
    value = std::max(value, std::abs(ma - mb));
  }

  DiscrepancyReport rep;
  rep.n_samples = static_cast<std::int64_t>(sample_a.size());
  rep.value = value;
  rep.dictionary_size = static_cast<int>(dict.size());
  rep.beta = beta;
  return rep;
}

double inj_fraction_below(const std::vector<LatticePoint>& samples, double r) {
  if (samples.empty()) throw EmptySample("recurrence probe needs samples");
  std::int64_t hits = 0;
  for (const LatticePoint& x : samples)
    if (injectivity_proxy(x) < r) ++hits;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace liewalk
