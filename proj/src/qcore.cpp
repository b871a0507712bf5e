#include "gsup/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gsup/error.hpp"
#include "gsup/rng.hpp"
#include "gsup/tolerances.hpp"

namespace gsup {

namespace {

bool gaussian_limit(double q) { return std::abs(q - 1.0) < tol::kGaussianLimit; }

// {1 - d2 / radius2}_+^exponent with an exact zero on and beyond the radius.
double truncated_power(double d2, double radius2, double exponent) {
  if (d2 >= radius2) return 0.0;
  return std::pow(1.0 - d2 / radius2, exponent);
}

}  // namespace

void QGaussian::validate() const {
  const int p = dim();
  if (p < 1) throw DomainError("q-Gaussian needs dimension p >= 1");
  if (!(sigma2 > 0.0)) throw DomainError("q-Gaussian needs sigma2 > 0");
  if (!(q < 1.0 + 2.0 / p)) {
    std::ostringstream os;
    os << "q-Gaussian needs q < 1 + 2/p (q=" << q << ", p=" << p << ")";
    throw DomainError(os.str());
  }
}

double QGaussian::support_radius2() const {
  if (q >= 1.0 || gaussian_limit(q)) return std::numeric_limits<double>::infinity();
  return 2.0 * sigma2 / (1.0 - q);
}

void TuningParams::validate() const {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("model parameter s must be > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("scale parameter tau must be > 0");
}

double TuningParams::influence_radius() const { return tau / std::sqrt(s); }

double q_exp(double u, double q) {
  if (gaussian_limit(q)) return std::exp(u);
  const double base = 1.0 + (1.0 - q) * u;
  if (base <= 0.0) {
    // q < 1: clamped to zero. q > 1: the pole, approached from below.
    return q < 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::pow(base, 1.0 / (1.0 - q));
}

double q_gaussian_normalizer(int p, double q) {
  if (p < 1) throw DomainError("dimension p must be >= 1");
  if (!(q < 1.0 + 2.0 / p)) throw DomainError("normalizer needs q < 1 + 2/p");
  if (gaussian_limit(q)) return 1.0;
  const double half_p = 0.5 * p;
  if (q < 1.0) {
    const double a = 1.0 / (1.0 - q);
    return std::exp(half_p * std::log(1.0 - q) + std::lgamma(1.0 + half_p + a) -
                    std::lgamma(1.0 + a));
  }
  const double b = 1.0 / (q - 1.0);
  return std::exp(half_p * std::log(q - 1.0) + std::lgamma(b) - std::lgamma(b - half_p));
}

double q_gaussian_pdf(const Vector& x, const QGaussian& g) {
  g.validate();
  if (x.size() != g.mu.size()) throw DimensionError("q_gaussian_pdf: dim(x) != p");
  const int p = g.dim();
  const double d2 = (x - g.mu).squaredNorm();
  const double scale = q_gaussian_normalizer(p, g.q) /
                       (std::pow(2.0 * std::numbers::pi * g.sigma2, 0.5 * p));
  if (g.q < 1.0 && !gaussian_limit(g.q)) {
    return scale * truncated_power(d2, g.support_radius2(), 1.0 / (1.0 - g.q));
  }
  return scale * q_exp(-d2 / (2.0 * g.sigma2), g.q);
}

double weight(double dist2, const TuningParams& params) {
  const double radius2 = params.tau * params.tau / params.s;
  return truncated_power(dist2, radius2, 1.0 / params.s);
}

TuningParams to_tuning(double gamma, double q, double sigma) {
  if (!(q < 1.0)) throw DomainError("to_tuning needs q < 1");
  if (!(sigma > 0.0)) throw DomainError("to_tuning needs sigma > 0");
  const double excess = gamma - (1.0 - q);
  if (!(excess > 0.0)) {
    throw DomainError("to_tuning needs gamma > 1 - q; gamma = 1 - q gives the non-robust sample mean");
  }
  return TuningParams{(1.0 - q) / excess, sigma * std::sqrt(2.0 / excess)};
}

GammaSigma from_tuning(const TuningParams& params, double q) {
  params.validate();
  if (!(q < 1.0)) throw DomainError("from_tuning needs q < 1");
  const double excess = (1.0 - q) / params.s;
  return GammaSigma{excess + (1.0 - q), params.tau * std::sqrt(excess / 2.0)};
}

void DiscreteDensity::validate() const {
  if (points.rows() != masses.size()) throw DimensionError("discrete density: points/masses length mismatch");
  if (points.rows() == 0) throw DomainError("discrete density has empty support");
  if ((masses.array() < 0.0).any()) throw DomainError("discrete density has a negative mass");
  if (std::abs(masses.sum() - 1.0) > tol::kMassSum) throw DomainError("discrete density masses must sum to 1");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (!row_less(order[k - 1], order[k])) throw DomainError("discrete density has a repeated support point");
  }
}

QuadratureGrid midpoint_grid_1d(double lo, double hi, int n) {
  if (n < 1 || !(hi > lo)) throw DomainError("midpoint grid needs n >= 1 and hi > lo");
  QuadratureGrid grid;
  grid.nodes.resize(n, 1);
  grid.weights.resize(n);
  const double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    grid.nodes(i, 0) = lo + (i + 0.5) * h;
    grid.weights(i) = h;
  }
  return grid;
}

QuadratureGrid midpoint_grid_2d(double lo0, double hi0, double lo1, double hi1, int n0, int n1) {
  if (n0 < 1 || n1 < 1 || !(hi0 > lo0) || !(hi1 > lo1)) {
    throw DomainError("midpoint grid needs positive cell counts and nonempty ranges");
  }
  QuadratureGrid grid;
  grid.nodes.resize(static_cast<Eigen::Index>(n0) * n1, 2);
  grid.weights.resize(static_cast<Eigen::Index>(n0) * n1);
  const double h0 = (hi0 - lo0) / n0;
  const double h1 = (hi1 - lo1) / n1;
  Eigen::Index k = 0;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j, ++k) {
      grid.nodes(k, 0) = lo0 + (i + 0.5) * h0;
      grid.nodes(k, 1) = lo1 + (j + 0.5) * h1;
      grid.weights(k) = h0 * h1;
    }
  }
  return grid;
}

DiscreteDensity discretize(const DensityFn& density, const QuadratureGrid& grid) {
  std::vector<Eigen::Index> keep;
  std::vector<double> mass;
  for (Eigen::Index k = 0; k < grid.nodes.rows(); ++k) {
    const double m = density(grid.nodes.row(k).transpose()) * grid.weights(k);
    if (m > 0.0) {
      keep.push_back(k);
      mass.push_back(m);
    }
  }
  if (keep.empty()) throw DomainError("discretize: density vanishes on the whole grid");
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  DiscreteDensity f;
  f.points.resize(static_cast<Eigen::Index>(keep.size()), grid.nodes.cols());
  f.masses.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    f.points.row(static_cast<Eigen::Index>(i)) = grid.nodes.row(keep[i]);
    f.masses(static_cast<Eigen::Index>(i)) = mass[i] / total;
  }
  return f;
}

double power_norm(const DensityFn& g, double gamma, const QuadratureGrid& grid) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < grid.nodes.rows(); ++k) {
    acc += grid.weights(k) * std::pow(g(grid.nodes.row(k).transpose()), gamma + 1.0);
  }
  return std::pow(acc, 1.0 / (gamma + 1.0));
}

double gamma_cross_entropy(const DiscreteDensity& f, const DensityFn& g, double gamma,
                           const QuadratureGrid& grid) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
  f.validate();
  const double norm_pow = std::pow(power_norm(g, gamma, grid), gamma);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.points.rows(); ++i) {
    const double gi = g(f.points.row(i).transpose());
    if (!(gi >= 0.0) || !std::isfinite(gi)) throw DomainError("density evaluator returned an invalid value");
    acc += f.masses(i) * std::pow(gi, gamma);
  }
  return -acc / norm_pow / (gamma * (gamma + 1.0));
}

double gamma_divergence(const DiscreteDensity& f, const DensityFn& f_eval, const DensityFn& g,
                        double gamma, const QuadratureGrid& grid) {
  return gamma_cross_entropy(f, g, gamma, grid) - gamma_cross_entropy(f, f_eval, gamma, grid);
}

double q_gaussian_variance(const QGaussian& g) {
  g.validate();
  const int p = g.dim();
  if (!(g.q < 1.0 + 2.0 / (p + 2))) throw DomainError("covariance needs q < 1 + 2/(p + 2)");
  if (gaussian_limit(g.q)) return g.sigma2;
  return 2.0 / (2.0 + (p + 2) * (1.0 - g.q)) * g.sigma2;
}

DataMatrix q_gaussian_sample(const QGaussian& g, int n, std::uint64_t seed) {
  g.validate();
  const int p = g.dim();
  if (!(g.q < 1.0 + 2.0 / (p + 2))) throw DomainError("sampling needs q < 1 + 2/(p + 2)");
  if (n < 0) throw DomainError("sample size must be >= 0");
  CounterRng rng(seed);
  const double sigma = std::sqrt(g.sigma2);
  DataMatrix out(n, p);
  Vector z(p);

  if (gaussian_limit(g.q)) {
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < p; ++c) z(c) = rng.normal();
      out.row(i) = (g.mu + sigma * z).transpose();
    }
    return out;
  }

  if (g.q < 1.0) {
    const double radius2 = g.support_radius2();
    const double radius = std::sqrt(radius2);
    const double exponent = 1.0 / (1.0 - g.q);
    for (int i = 0; i < n; ++i) {
      for (;;) {
        double norm2 = 0.0;
        do {
          for (int c = 0; c < p; ++c) z(c) = rng.normal();
          norm2 = z.squaredNorm();
        } while (norm2 == 0.0);
        const double r = radius * std::pow(rng.uniform(), 1.0 / p);
        z *= r / std::sqrt(norm2);
        if (rng.uniform() < truncated_power(r * r, radius2, exponent)) break;
      }
      out.row(i) = (g.mu + z).transpose();
    }
    return out;
  }

  // 1 < q: multivariate t with nu = 2/(q-1) - p and scale ((p + nu)/nu) sigma2 I.
  const double nu = 2.0 / (g.q - 1.0) - p;
  const double scale = sigma * std::sqrt((p + nu) / nu);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < p; ++c) z(c) = rng.normal();
    const double chi2 = 2.0 * rng.gamma(0.5 * nu);
    out.row(i) = (g.mu + scale * z / std::sqrt(chi2 / nu)).transpose();
  }
  return out;
}

}  // namespace gsup
