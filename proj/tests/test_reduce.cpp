#include "doctest.h"
#include "gsup/error.hpp"
#include "gsup/reduce.hpp"
#include "gsup/tolerances.hpp"
#include "support.hpp"

using namespace gsup;

namespace {

double orthonormality_error(const Matrix& f) {
  return (f.transpose() * f - Matrix::Identity(f.cols(), f.cols())).cwiseAbs().maxCoeff();
}

ImageStack random_stack(int n, int d1, int d2, std::uint64_t seed) {
  ImageStack s;
  s.pixels = test::normal_cloud(n, d1 * d2, seed);
  s.d1 = d1;
  s.d2 = d2;
  return s;
}

DataMatrix pair_dist2(const DataMatrix& x) {
  DataMatrix d(x.rows(), x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) d(i, j) = (x.row(i) - x.row(j)).squaredNorm();
  }
  return d;
}

}  // namespace

TEST_SUITE("reduce") {

TEST_CASE("MPCA factors are orthonormal after every sweep count") {
  const auto stack = random_stack(60, 9, 7, 70);
  for (int sweeps = 1; sweeps <= 5; ++sweeps) {
    const auto m = mpca_fit(stack, 4, 3, sweeps);
    CHECK(m.r1() == 4);
    CHECK(m.r2() == 3);
    CHECK(orthonormality_error(m.left_factors) < tol::kOrthonormal);
    CHECK(orthonormality_error(m.right_factors) < tol::kOrthonormal);
    CHECK(m.sweeps <= sweeps);
    for (std::size_t t = 1; t < m.error_trace.size(); ++t) CHECK(m.error_trace[t] <= m.error_trace[t - 1] * (1.0 + 1e-12));
  }
}

TEST_CASE("full-rank MPCA is lossless") {
  const auto stack = random_stack(30, 6, 5, 71);
  const auto m = mpca_fit(stack, 6, 5);
  CHECK(mpca_reconstruction_error(m, stack) < 1e-20);
  const auto back = mpca_reconstruct(m, mpca_project(m, stack));
  CHECK((back.pixels - stack.pixels).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("mean image projects to zero") {
  const auto stack = random_stack(40, 8, 8, 72);
  const auto m = mpca_fit(stack, 3, 3);
  ImageStack mean;
  mean.d1 = 8;
  mean.d2 = 8;
  mean.pixels.resize(1, 64);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) mean.pixels(0, r * 8 + c) = m.mean_image(r, c);
  }
  CHECK(mpca_project(m, mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rank-one images recover their factors") {
  const int d1 = 12, d2 = 10, n = 300;
  CounterRng rng(73);
  Vector u(d1), v(d2);
  for (int i = 0; i < d1; ++i) u(i) = rng.normal();
  for (int i = 0; i < d2; ++i) v(i) = rng.normal();
  u.normalize();
  v.normalize();
  // Pixel signal variance var(a) / (d1 d2) = 10 against unit noise.
  const double a_sd = std::sqrt(10.0 * d1 * d2);
  ImageStack stack;
  stack.d1 = d1;
  stack.d2 = d2;
  stack.pixels.resize(n, d1 * d2);
  for (int i = 0; i < n; ++i) {
    const double a = a_sd * rng.normal();
    for (int r = 0; r < d1; ++r) {
      for (int c = 0; c < d2; ++c) stack.pixels(i, r * d2 + c) = a * u(r) * v(c) + rng.normal();
    }
  }
  const auto m = mpca_fit(stack, 2, 2);
  CHECK(std::abs(m.left_factors.col(0).dot(u)) > 0.99);
  CHECK(std::abs(m.right_factors.col(0).dot(v)) > 0.99);
}

TEST_CASE("MPCA error does not grow with the ranks") {
  const auto stack = random_stack(50, 7, 6, 74);
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 6; ++r) {
    const double e = mpca_reconstruction_error(mpca_fit(stack, r, r), stack);
    CHECK(e <= prev * (1.0 + 1e-9));
    prev = e;
  }
  CHECK_THROWS_AS(mpca_fit(stack, 8, 2), DimensionError);
  CHECK_THROWS_AS(mpca_fit(stack, 0, 2), DimensionError);
}

TEST_CASE("full-rank PCA preserves distances") {
  const auto data = test::normal_cloud(40, 5, 75, 2.0);
  const auto r = pca_fit_project(data, 5);
  CHECK(orthonormality_error(r.components) < tol::kOrthonormal);
  CHECK((pair_dist2(r.scores) - pair_dist2(data)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.explained_variance_ratio.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("PCA finds a line") {
  const int n = 200;
  DataMatrix data(n, 2);
  CounterRng rng(76);
  for (int i = 0; i < n; ++i) {
    const double t = rng.uniform(-5.0, 5.0);
    data(i, 0) = t + 1e-3 * rng.normal();
    data(i, 1) = 0.5 * t + 1e-3 * rng.normal();
  }
  const auto r = pca_fit_project(data, 1);
  CHECK(r.explained_variance_ratio(0) > 0.99);
  CHECK(std::abs(r.components(1, 0) / r.components(0, 0) - 0.5) < 1e-3);
}

TEST_CASE("eigenvector sign convention and determinism") {
  const auto data = test::normal_cloud(50, 6, 77);
  const auto a = pca_fit_project(data, 3);
  const auto b = pca_fit_project(data, 3);
  CHECK(a.scores == b.scores);
  for (Eigen::Index k = 0; k < a.components.cols(); ++k) {
    Eigen::Index at = 0;
    a.components.col(k).cwiseAbs().maxCoeff(&at);
    CHECK(a.components(at, k) > 0.0);
  }
  Vector eig;
  Matrix sym(2, 2);
  sym << 2.0, 0.0, 0.0, 5.0;
  const auto top = top_eigenvectors(sym, 2, &eig);
  CHECK(eig(0) == doctest::Approx(5.0));
  CHECK(top(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("PCA input errors") {
  auto data = test::normal_cloud(20, 3, 78);
  CHECK_THROWS_AS(pca_fit_project(data, 4), DimensionError);
  data.col(1).setConstant(2.0);
  CHECK_THROWS_AS(pca_fit_project(data, 2, true), DomainError);
  CHECK_NOTHROW(pca_fit_project(data, 2, false));
}

}  // TEST_SUITE
