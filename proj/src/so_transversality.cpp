#include "liewalk/so_transversality.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>

#include "liewalk/errors.hpp"
#include "liewalk/rng.hpp"

namespace liewalk {

namespace {

using namespace std::complex_literals;

CMat unit(int dim, int i, int j) {
  CMat e = CMat::Zero(dim, dim);
  e(i, j) = 1.0;
  return e;
}

// Exact integral entry or throw; the structural identities are checked in
// integer arithmetic, which doubles represent exactly at this size.
long long exact_int(const std::complex<double>& x) {
  if (x.imag() != 0.0 || x.real() != std::nearbyint(x.real()))
    throw InvariantViolation("basis entry is not an exact integer");
  return static_cast<long long>(x.real());
}

// h^{-1} = Q^{-1} h^T Q = P h^T P with the integer swap matrix P = 2Q.
CMat form_inverse(const SOQModel& model, const CMat& h) {
  const int n = model.n;
  CMat ht = h.transpose();
  CMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = ht.bottomRightCorner(n, n);
  out.topRightCorner(n, n) = ht.bottomLeftCorner(n, n);
  out.bottomLeftCorner(n, n) = ht.topRightCorner(n, n);
  out.bottomRightCorner(n, n) = ht.topLeftCorner(n, n);
  return out;
}

int stacked_rank(const CMat& stacked, double tol) {
  Eigen::JacobiSVD<CMat> svd(stacked);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

}  // namespace

SOQModel SOQModel::build(int n) {
  if (n < 2) throw ConfigError("the split orthogonal model needs n >= 2");
  SOQModel model;
  model.n = n;
  const int D = 2 * n;
  model.form = CMat::Zero(D, D);
  for (int k = 0; k < n; ++k) {
    model.form(k, n + k) = 0.5;
    model.form(n + k, k) = 0.5;
  }

  for (int k = 0; k < n; ++k)
    model.so_basis.push_back(unit(D, k, k) - unit(D, n + k, n + k));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (k != l)
        model.so_basis.push_back(unit(D, k, l) - unit(D, n + l, n + k));
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      model.so_basis.push_back(unit(D, k, n + l) - unit(D, l, n + k));
      model.so_basis.push_back(unit(D, n + l, k) - unit(D, n + k, l));
    }
  if (static_cast<int>(model.so_basis.size()) != n * (2 * n - 1))
    throw InvariantViolation("orthogonal basis has the wrong count");

  for (int l = 1; l < n; ++l)
    model.v1_basis.push_back(unit(D, 0, l) - unit(D, n + l, n));
  for (int l = 1; l < n; ++l)
    model.v1_basis.push_back(unit(D, 0, n + l) - unit(D, l, n));
  return model;
}

bool exact_structure_check(const SOQModel& model) {
  const int n = model.n;
  const int D = 2 * n;
  // P = 2Q as exact integers.
  std::vector<std::vector<long long>> p(D, std::vector<long long>(D, 0));
  for (int k = 0; k < n; ++k) p[k][n + k] = p[n + k][k] = 1;

  auto as_int = [D](const CMat& m) {
    std::vector<std::vector<long long>> out(D, std::vector<long long>(D));
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) out[i][j] = exact_int(m(i, j));
    return out;
  };

  for (const CMat& b : model.so_basis) {
    const auto m = as_int(b);
    // M^T P + P M = 0 entrywise.
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        long long acc = 0;
        for (int k = 0; k < D; ++k) acc += m[k][i] * p[k][j] + p[i][k] * m[k][j];
        if (acc != 0) return false;
      }
    // Block identities A^T = -D, B^T = -B, C^T = -C.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (m[j][i] != -m[n + i][n + j]) return false;
        if (m[j][n + i] != -m[i][n + j]) return false;
        if (m[n + j][i] != -m[n + i][j]) return false;
      }
  }

  // ad(H_1) acts as +1 on the weight space, exactly.
  const auto h1 = as_int(model.so_basis[0]);
  for (const CMat& b : model.v1_basis) {
    const auto m = as_int(b);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        long long acc = 0;
        for (int k = 0; k < D; ++k) acc += h1[i][k] * m[k][j] - m[i][k] * h1[k][j];
        if (acc != m[i][j]) return false;
      }
  }
  return true;
}

CMat m_w(const SOQModel& model, const CVec& w) {
  const int n = model.n;
  if (w.size() != 2 * n) throw AmbientMismatch("vector has the wrong dimension");
  const double scale = 1.0 + w.norm();
  if (std::abs(w(0)) > 1e-12 * scale || std::abs(w(n)) > 1e-12 * scale)
    throw NotOrthogonal("w must have no component on e_1 or e_{n+1}");
  CMat m = CMat::Zero(2 * n, 2 * n);
  for (int l = 1; l < n; ++l) {
    m += (-w(n + l) / 2.0) * model.v1_basis[l - 1];          // Y_{1,l+1}
    m += (-w(l) / 2.0) * model.v1_basis[(n - 1) + (l - 1)];  // Z_{1,l+1}
  }
  return m;
}

CMat random_so_group_element(const SOQModel& model, std::uint64_t seed) {
  Rng rng(seed, 0);
  CMat h = CMat::Identity(2 * model.n, 2 * model.n);
  for (int rep = 0; rep < 2; ++rep) {
    CMat x = CMat::Zero(2 * model.n, 2 * model.n);
    for (const CMat& b : model.so_basis)
      x += std::complex<double>(rng.normal(), rng.normal()) * b;
    const double nrm = x.norm();
    if (nrm > 1.0) x /= nrm;
    h = h * x.exp();
  }
  return h;
}

void require_so_q(const SOQModel& model, const CMat& h, double tol) {
  if (h.rows() != 2 * model.n || h.cols() != 2 * model.n)
    throw AmbientMismatch("group element has the wrong dimension");
  const double err =
      (h.transpose() * model.form * h - model.form).norm();
  if (!(err <= tol * std::max(1.0, h.squaredNorm())))
    throw NotInGroup("matrix does not preserve the bilinear form");
}

int direct_sum_defect(const SOQModel& model, const std::vector<CMat>& h,
                      double tol) {
  if (h.size() < 2) throw ConfigError("need at least two translates");
  const int D = 2 * model.n;
  const int v1 = static_cast<int>(model.v1_basis.size());
  CMat stacked(D * D, static_cast<int>(h.size()) * v1);
  int col = 0;
  for (const CMat& hi : h) {
    require_so_q(model, hi, tol);
    const CMat hinv = form_inverse(model, hi);
    for (const CMat& b : model.v1_basis) {
      CMat conj = hi * b * hinv;
      conj /= conj.norm();
      stacked.col(col++) = Eigen::Map<const CVec>(conj.data(), conj.size());
    }
  }
  return static_cast<int>(h.size()) * v1 - stacked_rank(stacked, tol);
}

int root_space_defect(const LieAlgebra& alg, const std::vector<Mat>& h,
                      double tol) {
  if (h.size() < 2) throw ConfigError("need at least two translates");
  const Subspace& v1 = alg.restricted_roots().positive.front().space;
  Mat stacked(alg.algebra_dim(), static_cast<int>(h.size()) * v1.dim());
  int col = 0;
  for (const Mat& hi : h) {
    alg.require_in_group(hi, tol);
    const Mat ad = alg.adjoint_operator(hi);
    for (int j = 0; j < v1.dim(); ++j) {
      Vec c = ad * v1.frame().col(j);
      stacked.col(col++) = c / c.norm();
    }
  }
  const RankDecision rd = numerical_rank(stacked, tol);
  return static_cast<int>(h.size()) * v1.dim() - rd.rank;
}

RelationResult find_relation(const SOQModel& model,
                             const std::vector<CMat>& h, double tol) {
  if (h.size() != 4) throw ConfigError("the relation needs exactly four translates");
  const int n = model.n;
  const int D = 2 * n;
  for (const CMat& hi : h) require_so_q(model, hi, tol);

  CMat u(D, 4);  // columns h_b e_1
  for (int b = 0; b < 4; ++b) u.col(b) = h[b].col(0);
  if (stacked_rank(u, tol) < 4)
    throw DegenerateConfiguration("the translated vectors h_a e_1 are dependent");

  std::vector<CMat> hinv;
  for (const CMat& hi : h) hinv.push_back(form_inverse(model, hi));
  // v(a, b) = h_a^{-1} h_b e_1; the constraints read the coordinates of
  // sum_b lambda_{ab} v(a, b) on e_1 and e_{n+1}.
  std::vector<std::vector<CVec>> v(4, std::vector<CVec>(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v[a][b] = hinv[a] * u.col(b);

  // Unknowns: lambda_{cd} for pairs c <= d, lexicographic.
  std::vector<std::pair<int, int>> pairs;
  for (int c = 0; c < 4; ++c)
    for (int d = c; d < 4; ++d) pairs.emplace_back(c, d);

  CMat constraints = CMat::Zero(8, 10);
  for (int a = 0; a < 4; ++a)
    for (int which = 0; which < 2; ++which) {
      const int row = 2 * a + which;
      const int coord = which == 0 ? 0 : n;
      for (int p = 0; p < 10; ++p) {
        const auto [c, d] = pairs[p];
        if (a == c && a == d)
          constraints(row, p) = v[a][a](coord);
        else if (a == c)
          constraints(row, p) = v[a][d](coord);
        else if (a == d)
          constraints(row, p) = v[a][c](coord);
      }
    }

  Eigen::JacobiSVD<CMat> svd(constraints, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  RelationResult res;
  res.solution_dim = 10 - rank;
  if (res.solution_dim < 2)
    throw DegenerateConfiguration("constraint null space is too small");

  CVec lam = svd.matrixV().col(9);
  int arg = 0;
  for (int i = 1; i < 10; ++i)
    if (std::abs(lam(i)) > std::abs(lam(arg))) arg = i;
  lam *= std::conj(lam(arg)) / std::abs(lam(arg));  // deterministic phase

  res.lambda = CMat::Zero(4, 4);
  for (int p = 0; p < 10; ++p) {
    const auto [c, d] = pairs[p];
    res.lambda(c, d) = lam(p);
    res.lambda(d, c) = lam(p);
  }

  double wmax = 0.0;
  for (int a = 0; a < 4; ++a) {
    CVec wa = CVec::Zero(D);
    for (int b = 0; b < 4; ++b) wa += res.lambda(a, b) * v[a][b];
    wa(0) = 0.0;  // exact by the constraints up to solver noise
    wa(n) = 0.0;
    wmax = std::max(wmax, wa.norm());
    res.w.push_back(wa);
  }
  if (wmax <= 1e-10)
    throw DegenerateConfiguration("relation degenerates to zero vectors");

  CMat total = CMat::Zero(D, D);
  for (int a = 0; a < 4; ++a)
    total += h[a] * m_w(model, res.w[a]) * hinv[a];
  res.residual = total.norm();
  return res;
}

}  // namespace liewalk
