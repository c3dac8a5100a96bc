#include <doctest.h>

#include <cmath>
#include <random>

#include "gvb/eigen.hpp"
#include "gvb/error.hpp"
#include "gvb/graphs.hpp"
#include "gvb/mrcore.hpp"
#include "gvb/product.hpp"
#include "support.hpp"

using namespace gvb;

namespace {

SparsePolyMatrix singleton(const Poly& p, Signature sig) {
  SparsePolyMatrix m(1, sig);
  m.add(0, 0, p);
  return m;
}

CsrMatrix constant(double c) { return singleton(Poly::constant(c), Signature::y).eval(0); }
CsrMatrix zero1() { return SparsePolyMatrix(1, Signature::y).eval(0); }

double residual(const CsrMatrix& m, const EigenPack& e) {
  std::vector<double> mv(m.n);
  kernels::spmv(m, e.eigvec, mv, ExecPolicy::serial);
  double r = 0;
  for (std::size_t i = 0; i < m.n; ++i) r += (mv[i] - e.lambda * e.eigvec[i]) * (mv[i] - e.lambda * e.eigvec[i]);
  return std::sqrt(r);
}

}  // namespace

TEST_CASE("swcc(3,2) B at y = 0.3") {
  const auto b = build_B(build_swcc(3, 2));
  const auto e = eigen_at(b, 0.3, 2, {});
  CHECK(e.lambda == doctest::Approx(1.659).epsilon(0.001 / 1.659));
  REQUIRE(e.d1);
  REQUIRE(e.d2);
  CHECK(std::abs(*e.d1 - 0.694) <= 1e-3);
  CHECK(std::abs(*e.d2 - 0.183) <= 1e-3);
  CHECK(e.lambda == doctest::Approx(test::dense_radius(b.eval(0.3))).epsilon(1e-9));
}

TEST_CASE("constant and scalar matrices") {
  const auto e = power_I(constant(3.5), zero1(), {});
  CHECK(e.lambda == doctest::Approx(3.5));
  CHECK(*e.d1 == doctest::Approx(0.0));

  const auto m = singleton(Poly::constant(4) + Poly::monomial(6, 0, 1) + Poly::monomial(6, 0, 2), Signature::y);
  for (double y : {0.0, 0.5, 0.9}) {
    const auto s = eigen_at(m, y, 2, {});
    CHECK(s.lambda == doctest::Approx(4 + 6 * y + 6 * y * y).epsilon(1e-14));
    CHECK(*s.d1 == doctest::Approx(6 + 12 * y).epsilon(1e-14));
    CHECK(*s.d2 == doctest::Approx(12).epsilon(1e-14));
  }
}

TEST_CASE("bivariate with constant partials") {
  const auto m = constant(2.0), z = zero1();
  const auto e = power_III(m, z, z, z, z, z, {});
  REQUIRE(e.partials);
  CHECK(e.partials->x == 0);
  CHECK(e.partials->y == 0);
  CHECK(e.lambda == doctest::Approx(2.0));
}

TEST_CASE("eigenvector is a positive unit residual minimiser") {
  for (const auto& g : {build_swcc(3, 2), build_rll(1, 3), build_rll(3, 7), build_swcc(5, 3)}) {
    const auto b = build_B(g);
    for (double y : {0.1, 0.5, 1.0}) {
      const auto m = b.eval(y);
      const auto e = power_iteration(m, {});
      CHECK(e.lambda > 0);
      CHECK(residual(m, e) <= 1e-8 * e.lambda);
      double n2 = 0;
      for (double v : e.eigvec) {
        CHECK(v >= -1e-12);
        n2 += v * v;
      }
      CHECK(n2 == doctest::Approx(1.0));
      CHECK(e.lambda == doctest::Approx(test::dense_radius(m)).epsilon(1e-8));
    }
  }
}

TEST_CASE("imprimitive pattern still converges") {
  // Period-3 cycle: plain power iteration oscillates forever.
  const auto g = build_secc_multistate(3, 2);
  const auto a = adjacency_matrix(g).eval(0);
  CHECK(pattern_period(a) == 3);
  const auto e = power_iteration(a, {});
  CHECK(e.lambda == doctest::Approx(std::cbrt(4.0)).epsilon(1e-9));
}

TEST_CASE("derivatives match finite differences") {
  // Differences are taken on dense eigenvalues so the solver is not its own oracle.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (const auto& g : {build_swcc(3, 2), build_rll(1, 3)}) {
    const auto b = build_B(g);
    const MatrixMrModel mm(g);
    for (int k = 0; k < 5; ++k) {
      const double y = u(rng), x = 0.3 + 2 * u(rng);
      const auto e = eigen_at(b, y, 2, {});
      const double h1 = 1e-5, h2 = 1e-4;
      auto lam = [&](double t) { return test::dense_radius(b.eval(t)); };
      const double fd1 = (lam(y + h1) - lam(y - h1)) / (2 * h1);
      const double fd2 = (lam(y + h2) - 2 * lam(y) + lam(y - h2)) / (h2 * h2);
      CHECK(test::rel_err(*e.d1, fd1) <= 1e-5);
      CHECK(test::rel_err(*e.d2, fd2) <= 1e-5);

      const auto c = mm.c_at(x, 2, {});
      auto cl = [&](double t) { return test::dense_radius(mm.C().eval(t)); };
      CHECK(test::rel_err(c.d1, (cl(x + h1) - cl(x - h1)) / (2 * h1)) <= 1e-5);
      CHECK(test::rel_err(c.d2, (cl(x + h2) - 2 * cl(x) + cl(x - h2)) / (h2 * h2)) <= 1e-5);

      const auto d = mm.d_at(x, y, 2, {});
      auto dl = [&](double a, double bb) { return test::dense_radius(mm.D().eval(a, bb)); };
      CHECK(test::rel_err(d.x, (dl(x + h1, y) - dl(x - h1, y)) / (2 * h1)) <= 1e-5);
      CHECK(test::rel_err(d.y, (dl(x, y + h1) - dl(x, y - h1)) / (2 * h1)) <= 1e-5);
      CHECK(test::rel_err(d.xx, (dl(x + h2, y) - 2 * dl(x, y) + dl(x - h2, y)) / (h2 * h2)) <= 1e-5);
      CHECK(test::rel_err(d.yy, (dl(x, y + h2) - 2 * dl(x, y) + dl(x, y - h2)) / (h2 * h2)) <= 1e-5);
      const double mixed =
          (dl(x + h2, y + h2) - dl(x + h2, y - h2) - dl(x - h2, y + h2) + dl(x - h2, y - h2)) / (4 * h2 * h2);
      CHECK(test::rel_err(d.xy, mixed) <= 1e-5);
    }
  }
}

TEST_CASE("serial and parallel kernels agree") {
  const auto m = build_B(build_swcc(8, 5)).eval(0.4);
  std::vector<double> x(m.n), ys(m.n), yp(m.n);
  for (std::size_t i = 0; i < m.n; ++i) x[i] = 1.0 / static_cast<double>(i + 1);
  kernels::spmv(m, x, ys, ExecPolicy::serial);
  kernels::spmv(m, x, yp, ExecPolicy::parallel);
  CHECK(ys == yp);
  CHECK(kernels::dot(ys, x, ExecPolicy::serial) == doctest::Approx(kernels::dot(yp, x, ExecPolicy::parallel)));
  SolverConfig serial, parallel;
  serial.exec = ExecPolicy::serial;
  CHECK(power_iteration(m, serial).lambda == doctest::Approx(power_iteration(m, parallel).lambda).epsilon(1e-12));
}

TEST_CASE("solver failures") {
  SolverConfig tight;
  tight.power_max_iter = 2;
  const auto m = build_B(build_rll(3, 7)).eval(0.5);
  CHECK_THROWS_AS(power_iteration(m, tight), NoConvergence);
  try {
    power_iteration(m, tight);
  } catch (const NoConvergence& e) {
    CHECK(e.is_numeric());
    CHECK(e.iterations() == 2);
  }
  SolverConfig bad;
  bad.power_tol = -1;
  CHECK_THROWS_AS(bad.check(), Error);
}
