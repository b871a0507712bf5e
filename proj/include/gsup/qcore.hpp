#pragma once

#include <functional>

#include "gsup/types.hpp"

namespace gsup {

/// Isotropic q-Gaussian G_q(mu, sigma2 * I_p).
struct QGaussian {
  double q = 1.0;
  Vector mu;
  double sigma2 = 1.0;

  int dim() const { return static_cast<int>(mu.size()); }
  /// Throws DomainError unless sigma2 > 0, p >= 1 and q < 1 + 2/p.
  void validate() const;
  /// Squared radius of the support ball, 2 sigma2 / (1 - q); +inf for q >= 1.
  double support_radius2() const;
};

/// The (s, tau) pair that drives the self-updating process.
struct TuningParams {
  double s = 0.025;
  double tau = 1.0;

  void validate() const;
  /// tau / sqrt(s): beyond this distance the weight is exactly zero.
  double influence_radius() const;
};

/// (gamma, sigma) recovered from (s, tau) at a fixed q.
struct GammaSigma {
  double gamma;
  double sigma;
};

/// {1 + (1 - q) u}_+^{1/(1-q)}; e^u in the limit branch |q - 1| < 1e-12.
double q_exp(double u, double q);

/// c_{p,q} such that the q-Gaussian density integrates to one.
double q_gaussian_normalizer(int p, double q);

double q_gaussian_pdf(const Vector& x, const QGaussian& g);

/// Self-updating weight exp_{1-s}(-dist2 / tau^2) = {1 - s dist2 / tau^2}_+^{1/s}.
double weight(double dist2, const TuningParams& params);

TuningParams to_tuning(double gamma, double q, double sigma);
GammaSigma from_tuning(const TuningParams& params, double q);

/// Point masses used as the empirical density in divergence diagnostics.
struct DiscreteDensity {
  DataMatrix points;
  Vector masses;

  /// Masses nonnegative and summing to one; no repeated support point.
  void validate() const;
};

using DensityFn = std::function<double(const Vector&)>;

/// Nodes and weights of a quadrature rule, used for ||g||_{gamma+1}.
struct QuadratureGrid {
  DataMatrix nodes;
  Vector weights;
};

/// Composite midpoint rule on [lo, hi] with n cells.
QuadratureGrid midpoint_grid_1d(double lo, double hi, int n);
/// Tensor-product midpoint rule on [lo0, hi0] x [lo1, hi1].
QuadratureGrid midpoint_grid_2d(double lo0, double hi0, double lo1, double hi1, int n0, int n1);

/// Masses proportional to density(node) * weight on the grid; zero-mass nodes dropped.
DiscreteDensity discretize(const DensityFn& density, const QuadratureGrid& grid);

/// ||g||_{gamma+1} = (sum_k w_k g(x_k)^{gamma+1})^{1/(gamma+1)}.
double power_norm(const DensityFn& g, double gamma, const QuadratureGrid& grid);

/// C_gamma(f || g) = -1/(gamma(gamma+1)) sum_i f_i g(x_i)^gamma / ||g||_{gamma+1}^gamma.
double gamma_cross_entropy(const DiscreteDensity& f, const DensityFn& g, double gamma,
                           const QuadratureGrid& grid);

/// D_gamma(f || g) = C_gamma(f || g) - C_gamma(f || f); f_eval evaluates f as a function.
double gamma_divergence(const DiscreteDensity& f, const DensityFn& f_eval, const DensityFn& g,
                        double gamma, const QuadratureGrid& grid);

/// n i.i.d. draws from g. Requires q < 1 + 2/(p + 2) so that the covariance exists.
///
/// q < 1 uses rejection from the uniform distribution on the support ball; the
/// Gaussian limit draws normals; 1 < q uses the multivariate-t representation.
DataMatrix q_gaussian_sample(const QGaussian& g, int n, std::uint64_t seed);

/// Covariance scale of G_q(mu, sigma2 I): 2 / (2 + (p + 2)(1 - q)) * sigma2.
double q_gaussian_variance(const QGaussian& g);

}  // namespace gsup
