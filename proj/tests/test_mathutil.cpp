#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "windesign/mathutil.hpp"

using namespace windesign;

TEST_CASE("normal cdf reference points") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  // classic table values
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(normal_cdf(1.6448536269514722) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(normal_cdf(-8.0) < 1e-14);
  CHECK(normal_cdf(8.0) > 1.0 - 1e-14);
}

TEST_CASE("quantile inverts the cdf") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(inverse_normal_cdf(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-10));
  for (double p : {1e-10, 1e-6, 0.001, 0.02, 0.3, 0.5, 0.77, 0.99, 1 - 1e-6, 1 - 1e-10}) {
    const double x = inverse_normal_cdf(p);
    CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-9));
  }
  // roundtrip the other way; the deep lower tail keeps full relative precision
  for (double x = -6.0; x <= 5.5; x += 0.25)
    CHECK(inverse_normal_cdf(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  // above ~5.5 the cdf saturates toward 1 and double spacing near 1.0 caps the
  // recoverable accuracy at spacing/pdf(x) ~ 2e-8
  CHECK(inverse_normal_cdf(normal_cdf(6.0)) == doctest::Approx(6.0).epsilon(1e-7));
}

TEST_CASE("cholesky reconstructs a PD matrix and rejects a non-PD one") {
  Matrix r(3);
  const double vals[3][3] = {{1.0, 0.5, 0.3}, {0.5, 1.0, -0.2}, {0.3, -0.2, 1.0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.at(i, j) = vals[i][j];
  Matrix l(3);
  REQUIRE(cholesky(r, l));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += l.at(i, k) * l.at(j, k);
      CHECK(s == doctest::Approx(r.at(i, j)).epsilon(1e-12));
      if (j > i) CHECK(l.at(i, j) == 0.0);
    }

  Matrix bad = Matrix::identity(3);
  bad.at(0, 1) = bad.at(1, 0) = 0.9;
  bad.at(0, 2) = bad.at(2, 0) = 0.9;
  bad.at(1, 2) = bad.at(2, 1) = -0.9;  // eigenvalue < 0
  Matrix l2(3);
  CHECK_FALSE(cholesky(bad, l2));
}

TEST_CASE("jacobi eigenvalues of a known symmetric matrix") {
  // [[2,1],[1,2]] has eigenvalues 1 and 3
  Matrix a(2);
  a.at(0, 0) = 2;
  a.at(0, 1) = 1;
  a.at(1, 0) = 1;
  a.at(1, 1) = 2;
  Matrix vecs(2);
  std::vector<double> ev;
  jacobi_eigen(a, ev, vecs);
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));
  // eigenvector columns satisfy A v = lambda v
  for (int c = 0; c < 2; ++c) {
    double v0 = vecs.at(0, c), v1 = vecs.at(1, c);
    double av0 = 2 * v0 + v1, av1 = v0 + 2 * v1;
    const double lam = av0 / v0;
    CHECK(av1 / v1 == doctest::Approx(lam).epsilon(1e-9));
  }
}

TEST_CASE("repair produces a usable correlation matrix") {
  Matrix bad = Matrix::identity(3);
  bad.at(0, 1) = bad.at(1, 0) = 0.9;
  bad.at(0, 2) = bad.at(2, 0) = 0.9;
  bad.at(1, 2) = bad.at(2, 1) = -0.9;
  Matrix fixed = repair_correlation(bad);
  Matrix l(3);
  CHECK(cholesky(fixed, l));
  for (int i = 0; i < 3; ++i) CHECK(fixed.at(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(fixed.at(i, j) == doctest::Approx(fixed.at(j, i)));
  // a matrix that is already PD comes back (numerically) unchanged
  Matrix good = Matrix::identity(2);
  good.at(0, 1) = good.at(1, 0) = 0.4;
  Matrix same = repair_correlation(good);
  CHECK(same.at(0, 1) == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("random PD matrices survive cholesky round trips") {
  std::mt19937 gen(42);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 5;
    // build A A^T / diag-normalized => PD correlation
    std::vector<double> a(static_cast<size_t>(n) * (n + 2));
    for (auto& v : a) v = nd(gen);
    Matrix r(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n + 2; ++k) s += a[i * (n + 2) + k] * a[j * (n + 2) + k];
        r.at(i, j) = s;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) r.at(i, j) /= std::sqrt(r.at(i, i) * r.at(j, j));
    for (int i = 0; i < n; ++i) r.at(i, i) = 1.0;
    Matrix l(n);
    REQUIRE(cholesky(r, l));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += l.at(i, k) * l.at(j, k);
        CHECK(s == doctest::Approx(r.at(i, j)).epsilon(1e-10));
      }
  }
}
