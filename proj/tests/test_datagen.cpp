#include <boost/math/distributions/chi_squared.hpp>
#include <set>

#include "doctest.h"
#include "gsup/datagen.hpp"
#include "gsup/error.hpp"
#include "gsup/metrics.hpp"

using namespace gsup;

namespace {

double correlation(const Vector& a, const Vector& b) {
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  return ca.dot(cb) / (ca.norm() * cb.norm());
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("mixture shape and determinism") {
  for (double c : {2.0, 4.0}) {
    const MixtureSpec spec{c, 0.8, 100, 7};
    const auto a = gen_mixture(spec);
    const auto b = gen_mixture(spec);
    CHECK(a.data.rows() == 100);
    CHECK(a.data.cols() == 2);
    CHECK(a.truth.size() == 100);
    CHECK(a.data == b.data);
    CHECK(a.truth == b.truth);
  }
  const auto other = gen_mixture(MixtureSpec{4.0, 0.8, 100, 8});
  CHECK(other.data != gen_mixture(MixtureSpec{4.0, 0.8, 100, 7}).data);
}

TEST_CASE("degenerate mixture") {
  const auto d = gen_mixture(MixtureSpec{4.0, 1.0, 2000, 3});
  for (int t : d.truth) CHECK(t == 0);
  CHECK(d.data.colwise().mean().norm() < 0.1);
  CHECK_THROWS_AS(gen_mixture(MixtureSpec{4.0, 0.0, 10, 1}), DomainError);
  CHECK_THROWS_AS(gen_mixture(MixtureSpec{4.0, 0.8, 0, 1}), DomainError);
}

TEST_CASE("mixture label frequencies") {
  const int n = 10000;
  const auto d = gen_mixture(MixtureSpec{4.0, 0.8, n, 12});
  std::vector<double> observed(4, 0.0);
  for (int t : d.truth) observed[static_cast<std::size_t>(t)] += 1.0;
  const std::vector<double> p{0.8, 0.2 / 3, 0.2 / 3, 0.2 / 3};
  double chi2 = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const double e = p[k] * n;
    chi2 += (observed[k] - e) * (observed[k] - e) / e;
  }
  const boost::math::chi_squared dist(3.0);
  CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.001);

  const auto means = mixture_means(4.0);
  for (int k = 0; k < 4; ++k) {
    Eigen::RowVector2d sum = Eigen::RowVector2d::Zero();
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (d.truth[static_cast<std::size_t>(i)] != k) continue;
      sum += d.data.row(i);
      ++count;
    }
    CHECK((sum / count - means.row(k)).norm() < 6.0 / std::sqrt(count));
  }
}

TEST_CASE("toy layout") {
  const auto t = gen_toy(1);
  REQUIRE(t.data.rows() == 40);
  CHECK(t.data.cols() == 2);
  const Eigen::RowVector2d mid(1.1775, 1.1775);
  for (int i = 0; i < 40; ++i) {
    const int expect = i < 10 ? 0 : (i < 20 ? 1 : kToyNoiseLabel);
    CHECK(t.truth[static_cast<std::size_t>(i)] == expect);
    if (expect == kToyNoiseLabel) {
      const double r = (t.data.row(i) - mid).norm();
      CHECK(r >= 4.0);
      CHECK(r <= 6.0);
    }
  }
  CHECK(gen_toy(1).data == t.data);
}

TEST_CASE("image counts and truth convention") {
  ImageSimSpec spec;
  spec.n_images = 800;
  spec.misalign_frac = 0.1;
  spec.seed = 3;
  const auto d = gen_images(spec);
  CHECK(d.images.rows() == 800);
  CHECK(d.images.cols() == 256);
  std::size_t rotated = 0;
  for (bool m : d.misaligned) rotated += m;
  CHECK(rotated == 80);
  CHECK(distinct_count(d.truth) == 96);
  std::set<std::pair<int, double>> combos;
  std::vector<std::size_t> per_view(16, 0);
  for (std::size_t i = 0; i < 800; ++i) {
    if (!d.misaligned[i]) {
      CHECK(d.truth[i] == d.view[i]);
      CHECK(d.angle_deg[i] == 0.0);
    } else {
      CHECK(d.truth[i] >= 16);
      combos.emplace(d.view[i], d.angle_deg[i]);
      ++per_view[static_cast<std::size_t>(d.view[i])];
    }
  }
  // Rotated copies of one view use distinct angles until the angles run out.
  std::size_t expect = 0;
  for (auto c : per_view) expect += std::min<std::size_t>(c, 6);
  CHECK(combos.size() == expect);
  CHECK(combos.size() >= 75);

  spec.misalign_frac = 0.0;
  const auto aligned = gen_images(spec);
  for (bool m : aligned.misaligned) CHECK_FALSE(m);
  CHECK(distinct_count(aligned.truth) == 16);
}

TEST_CASE("realized SNR matches the target") {
  for (double snr : {0.19, 1.0}) {
    ImageSimSpec spec;
    spec.n_images = 400;
    spec.target_snr = snr;
    spec.misalign_frac = 0.1;
    spec.seed = 5;
    const auto d = gen_images(spec);
    CHECK(std::abs(d.realized_snr / snr - 1.0) < 0.1);
    const DataMatrix noise = d.images - [&] {
      DataMatrix clean(d.images.rows(), d.images.cols());
      const auto bank = make_template_bank(spec.n_templates, spec.image_side, spec.rotation_angles, spec.seed);
      for (Eigen::Index i = 0; i < clean.rows(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        clean.row(i) = render_template(bank[static_cast<std::size_t>(d.view[k])], spec.image_side, d.angle_deg[k]).transpose();
      }
      return clean;
    }();
    const double sd = std::sqrt((noise.array() - noise.mean()).square().mean());
    CHECK(sd == doctest::Approx(d.sigma_eps).epsilon(0.02));
  }
}

TEST_CASE("images are deterministic") {
  ImageSimSpec spec;
  spec.n_images = 50;
  spec.misalign_frac = 0.2;
  spec.seed = 9;
  const auto a = gen_images(spec);
  const auto b = gen_images(spec);
  CHECK(a.images == b.images);
  CHECK(a.truth == b.truth);
  spec.misalign_frac = 1.0;
  CHECK_THROWS_AS(gen_images(spec), DomainError);
}

TEST_CASE("rotation destroys alignment") {
  const int side = 16;
  const std::vector<double> angles{7.2, 14.4, 21.6, 28.8, 36.0, 43.2};
  const auto bank = make_template_bank(16, side, angles, 4);
  std::vector<Vector> flat;
  for (const auto& t : bank) flat.push_back(render_template(t, side));
  double own = 0.0, others = 0.0;
  int n_own = 0, n_other = 0;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    for (double a : angles) {
      const Vector rotated = render_template(bank[k], side, a);
      for (std::size_t j = 0; j < bank.size(); ++j) {
        const double c = std::abs(correlation(rotated, flat[j]));
        if (j == k) {
          own += c;
          ++n_own;
        } else {
          others += c;
          ++n_other;
        }
      }
    }
  }
  own /= n_own;
  others /= n_other;
  CAPTURE(own);
  CAPTURE(others);
  CHECK(own < 0.35);
  CHECK(own - others < 0.2);
  CHECK(correlation(render_template(bank[0], side, 0.0), flat[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

}  // TEST_SUITE
