#pragma once

// Numerical thresholds used across the library and its test suites.

namespace gsup::tol {

/// |q - 1| below this selects the Gaussian limit branch.
inline constexpr double kGaussianLimit = 1e-12;
/// Allowed deviation of a discrete density's total mass from 1.
inline constexpr double kMassSum = 1e-12;
/// to_tuning / from_tuning round trip.
inline constexpr double kTuningRoundTrip = 1e-12;
/// Quadrature of a q-Gaussian density over its support.
inline constexpr double kNormalization = 1e-6;
/// q_exp(u, 1 +- 1e-6) vs e^u on [-5, 5].
inline constexpr double kQExpLimit = 1e-4;
/// Projective invariance of the gamma cross entropy.
inline constexpr double kProjectiveInvariance = 1e-10;
/// Relative error of the q-Gaussian / multivariate-t proportionality.
inline constexpr double kTDensityRelative = 1e-8;
/// Translation / scale equivariance of cluster centers.
inline constexpr double kEquivariance = 1e-9;
/// Monte Carlo checks are stated in standard errors.
inline constexpr double kMonteCarloSE = 3.0;

/// Default convergence threshold on the max displacement, scaled units.
inline constexpr double kConvEps = 1e-8;
/// Default single-linkage merge radius for final representatives, scaled units.
inline constexpr double kMergeEps = 1e-4;
inline constexpr int kMaxIter = 1000;

/// Orthonormality of PCA / MPCA factors.
inline constexpr double kOrthonormal = 1e-10;
/// MPCA alternating sweeps stop when the error improves by less than this.
inline constexpr double kMpcaImprovement = 1e-8;

}  // namespace gsup::tol
