#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "liewalk/errors.hpp"
#include "liewalk/lie_algebra.hpp"

using namespace liewalk;

namespace {

Mat bracket(const Mat& x, const Mat& y) { return x * y - y * x; }

// Closed-form dimension table used as the oracle for every family we build.
struct DimCase {
  Family family;
  int param;
  int algebra_dim;
  int ambient;
  int rank;
};

}  // namespace

TEST_CASE("dimension table") {
  const std::vector<DimCase> cases = {
      {Family::SlReal, 2, 3, 2, 1},  {Family::SlReal, 3, 8, 3, 2},
      {Family::SlReal, 4, 15, 4, 3}, {Family::SoP1, 2, 3, 3, 1},
      {Family::SoP1, 3, 6, 4, 1},    {Family::SoP1, 7, 28, 8, 1},
  };
  for (const DimCase& c : cases) {
    const LieAlgebra alg = LieAlgebra::build(c.family, c.param);
    CHECK(alg.algebra_dim() == c.algebra_dim);
    CHECK(alg.ambient_dim() == c.ambient);
    CHECK(alg.rank() == c.rank);
    CHECK(static_cast<int>(alg.basis().size()) == c.algebra_dim);
    CHECK(static_cast<int>(alg.on_basis().size()) == c.algebra_dim);
    CHECK(!alg.is_complex());
  }
  const LieAlgebra c4 = LieAlgebra::build(Family::SoQComplex, 4);
  CHECK(c4.algebra_dim() == 28);
  CHECK(c4.ambient_dim() == 8);
  CHECK(c4.is_complex());
  CHECK(c4.basis_complex().size() == 28);
}

TEST_CASE("construction rejects tiny parameters") {
  CHECK_THROWS_AS(LieAlgebra::build(Family::SlReal, 1), ParamTooSmall);
  CHECK_THROWS_AS(LieAlgebra::build(Family::SoP1, 1), ParamTooSmall);
  CHECK_THROWS_AS(LieAlgebra::build(Family::SoQComplex, 1), ParamTooSmall);
}

TEST_CASE("bracket closure and coordinate round trip") {
  for (Family fam : {Family::SlReal, Family::SoP1}) {
    const LieAlgebra alg = LieAlgebra::build(fam, 3);
    const auto& basis = alg.basis();
    for (size_t i = 0; i < basis.size(); ++i)
      for (size_t j = i + 1; j < basis.size(); ++j) {
        const Mat br = bracket(basis[i], basis[j]);
        // coords() throws NotInAlgebra if the bracket left the span.
        const Vec c = alg.coords(br);
        CHECK((alg.from_coords(c) - br).norm() <= 1e-9 * (1.0 + br.norm()));
      }
  }
}

TEST_CASE("coords rejects matrices outside the algebra") {
  const LieAlgebra sl2 = LieAlgebra::build(Family::SlReal, 2);
  CHECK_THROWS_AS(sl2.coords(Mat::Identity(2, 2)), NotInAlgebra);  // trace 2
  CHECK_THROWS_AS(sl2.coords(Mat::Identity(3, 3)), NotInAlgebra);  // wrong size

  const LieAlgebra so31 = LieAlgebra::build(Family::SoP1, 3);
  Mat sym = Mat::Zero(4, 4);
  sym(0, 1) = sym(1, 0) = 1.0;  // symmetric rotation block: not in so(3,1)
  CHECK_THROWS_AS(so31.coords(sym), NotInAlgebra);
}

TEST_CASE("killing form agrees with the scaled trace form") {
  Rng rng(5);
  for (Family fam : {Family::SlReal, Family::SoP1}) {
    const LieAlgebra alg = LieAlgebra::build(fam, 3);
    for (int rep = 0; rep < 10; ++rep) {
      const Mat x = alg.random_algebra_element(rng);
      const Mat y = alg.random_algebra_element(rng);
      const double direct = alg.killing(x, y);
      const double shortcut = alg.killing_matrix_trace(x, y);
      CHECK(direct == doctest::Approx(shortcut).epsilon(1e-9));
    }
  }
}

TEST_CASE("theta is an isometric involution and the inner product is definite") {
  Rng rng(9);
  const LieAlgebra alg = LieAlgebra::build(Family::SoP1, 3);
  const Mat& th = alg.theta_on_coords();
  CHECK((th * th - Mat::Identity(6, 6)).norm() < 1e-10);
  CHECK((th.transpose() * th - Mat::Identity(6, 6)).norm() < 1e-10);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat x = alg.random_algebra_element(rng);
    CHECK(alg.inner(x, x) > 0.0);
    CHECK((alg.theta(alg.theta(x)) - x).norm() < 1e-12);
    // theta on coordinates matches theta on matrices.
    const Vec lhs = th * alg.coords(x);
    const Vec rhs = alg.coords(alg.theta(x));
    CHECK((lhs - rhs).norm() < 1e-9);
  }
}

TEST_CASE("orthonormal basis is orthonormal for the invariant inner product") {
  for (Family fam : {Family::SlReal, Family::SoP1}) {
    const LieAlgebra alg = LieAlgebra::build(fam, 3);
    const auto& on = alg.on_basis();
    for (size_t i = 0; i < on.size(); ++i)
      for (size_t j = 0; j <= i; ++j) {
        const double want = i == j ? 1.0 : 0.0;
        CHECK(alg.inner(on[i], on[j]) == doctest::Approx(want).epsilon(1e-9));
      }
  }
}

TEST_CASE("ad is inner-product antisymmetric in the compact directions") {
  // <[X,Y], Z> = -<Y, [theta(X), Z]>; for X fixed by theta (antisymmetric X)
  // this is plain antisymmetry of ad(X).
  const LieAlgebra alg = LieAlgebra::build(Family::SlReal, 3);
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat x = alg.random_algebra_element(rng);
    const Mat xc = 0.5 * (x - x.transpose().eval());  // compact part
    const Mat adx = alg.ad_matrix(xc);
    CHECK((adx + adx.transpose()).norm() < 1e-9 * (1.0 + adx.norm()));
  }
}

TEST_CASE("Ad(exp X) equals exp(ad X) and respects coordinates") {
  Rng rng(17);
  for (Family fam : {Family::SlReal, Family::SoP1}) {
    const LieAlgebra alg = LieAlgebra::build(fam, 3);
    for (int rep = 0; rep < 5; ++rep) {
      const Mat x = alg.random_algebra_element(rng, 0.8);
      const Mat g = x.exp();
      const Mat ad_g = alg.adjoint_operator(g);
      const Mat expected = alg.ad_matrix(x).exp();
      CHECK((ad_g - expected).norm() < 1e-8 * (1.0 + expected.norm()));

      const Mat y = alg.random_algebra_element(rng);
      const Vec via_op = ad_g * alg.coords(y);
      const Vec via_conj = alg.coords(g * y * g.inverse());
      CHECK((via_op - via_conj).norm() < 1e-8 * (1.0 + via_conj.norm()));
    }
  }
}

TEST_CASE("Ad of the standard diagonal has the root-value spectrum") {
  const LieAlgebra sl2 = LieAlgebra::build(Family::SlReal, 2);
  Mat g = Mat::Zero(2, 2);
  g(0, 0) = 2.0;
  g(1, 1) = 0.5;
  const Mat ad_g = sl2.adjoint_operator(g);
  Eigen::EigenSolver<Mat> es(ad_g);
  std::vector<double> eig;
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-10);
    eig.push_back(es.eigenvalues()(i).real());
  }
  std::sort(eig.begin(), eig.end());
  CHECK(eig[0] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(eig[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eig[2] == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("group membership") {
  const LieAlgebra sl2 = LieAlgebra::build(Family::SlReal, 2);
  CHECK(sl2.in_group(Mat::Identity(2, 2), 1e-8));
  CHECK(!sl2.in_group(2.0 * Mat::Identity(2, 2), 1e-8));
  CHECK_THROWS_AS(sl2.require_in_group(2.0 * Mat::Identity(2, 2), 1e-8),
                  NotInGroup);

  const LieAlgebra so31 = LieAlgebra::build(Family::SoP1, 3);
  Mat boost = Mat::Identity(4, 4);
  const double t = 0.7;
  boost(2, 2) = std::cosh(t);
  boost(2, 3) = std::sinh(t);
  boost(3, 2) = std::sinh(t);
  boost(3, 3) = std::cosh(t);
  CHECK(so31.in_group(boost, 1e-8));
  // Orthochronous condition: time reversal is excluded.
  Mat rev = Mat::Identity(4, 4);
  rev(2, 2) = -1.0;
  rev(3, 3) = -1.0;
  CHECK(!so31.in_group(rev, 1e-8));

  Rng rng(21);
  for (Family fam : {Family::SlReal, Family::SoP1}) {
    const LieAlgebra alg = LieAlgebra::build(fam, 3);
    for (int rep = 0; rep < 10; ++rep)
      CHECK(alg.in_group(alg.random_group_element(rng), 1e-8));
  }
}

TEST_CASE("restricted roots: closed-form root data") {
  struct RootCase {
    Family family;
    int param;
    int n_positive;
    std::vector<int> multiplicities;  // of the positive roots, sorted order
    int centralizer_dim;
  };
  const std::vector<RootCase> cases = {
      {Family::SlReal, 2, 1, {1}, 1},
      {Family::SlReal, 3, 3, {1, 1, 1}, 2},
      {Family::SoP1, 3, 1, {2}, 2},
      {Family::SoP1, 7, 1, {6}, 16},
  };
  for (const RootCase& c : cases) {
    const LieAlgebra alg = LieAlgebra::build(c.family, c.param);
    const RootDecomposition& roots = alg.restricted_roots();
    REQUIRE(static_cast<int>(roots.positive.size()) == c.n_positive);
    int mult_total = 0;
    for (int k = 0; k < c.n_positive; ++k) {
      CHECK(roots.positive[k].multiplicity == c.multiplicities[k]);
      CHECK(roots.positive[k].space.dim() == c.multiplicities[k]);
      mult_total += roots.positive[k].multiplicity;
    }
    CHECK(roots.centralizer.dim() == c.centralizer_dim);
    CHECK(2 * mult_total + c.centralizer_dim == alg.algebra_dim());
  }
}

TEST_CASE("restricted roots are ad-eigenvectors with the stated values") {
  const LieAlgebra sl3 = LieAlgebra::build(Family::SlReal, 3);
  const RootDecomposition& roots = sl3.restricted_roots();
  const std::vector<Mat> cartan = sl3.cartan_basis();
  for (const RestrictedRoot& root : roots.positive) {
    for (size_t b = 0; b < cartan.size(); ++b) {
      const Mat ad_h = sl3.ad_matrix(cartan[b]);
      const Mat frame = root.space.frame();
      const Mat resid = ad_h * frame - root.on_cartan_basis(b) * frame;
      CHECK(resid.norm() < 1e-8);
    }
  }
  // The centralizer is killed by every ad(H).
  for (size_t b = 0; b < cartan.size(); ++b) {
    const Mat ad_h = sl3.ad_matrix(cartan[b]);
    CHECK((ad_h * roots.centralizer.frame()).norm() < 1e-8);
  }
}

TEST_CASE("regular element separates the roots") {
  for (Family fam : {Family::SlReal, Family::SoP1}) {
    const LieAlgebra alg = LieAlgebra::build(fam, 3);
    const Mat reg = alg.regular_cartan_element();
    // It lies in the Cartan subspace: ad(H) kills it for all Cartan basis H.
    for (const Mat& h : alg.cartan_basis())
      CHECK((h * reg - reg * h).norm() < 1e-12);
    // Every positive root is strictly positive on it.
    const RootDecomposition& roots = alg.restricted_roots();
    const Mat ad_reg = alg.ad_matrix(reg);
    for (const RestrictedRoot& root : roots.positive) {
      const Vec v = root.space.frame().col(0);
      const double val = v.dot(ad_reg * v);
      CHECK(val > 1e-6);
    }
  }
}

TEST_CASE("random algebra elements are clamped and in the algebra") {
  Rng rng(29);
  const LieAlgebra alg = LieAlgebra::build(Family::SlReal, 3);
  for (int rep = 0; rep < 20; ++rep) {
    const Mat x = alg.random_algebra_element(rng, 0.5);
    CHECK(alg.coords(x).size() == 8);  // does not throw
    CHECK(alg.coords(x).norm() <= 0.5 + 1e-12);
  }
}
