#pragma once

#include <cstddef>

#include "gsup/qcore.hpp"
#include "gsup/tolerances.hpp"
#include "gsup/types.hpp"

namespace gsup {

/// Tuning pair plus the stopping and cluster-extraction rules of the self-updating
/// process. conv_eps and merge_eps are in scaled units (multiples of tau).
struct GammaSupConfig {
  TuningParams params;
  double conv_eps = tol::kConvEps;
  double merge_eps = tol::kMergeEps;
  int max_iter = tol::kMaxIter;
  /// Worker threads for the sweep kernels; 0 uses the OpenMP default.
  int threads = 0;
  /// Run the serial reference kernels instead of the OpenMP ones.
  bool serial_reference = false;
  /// Blurring only: fold bitwise-identical representatives into one weighted row.
  /// Identical rows receive identical updates, so this changes only rounding.
  bool collapse_duplicates = true;
  /// Keep a snapshot of the representatives (data units) before every sweep.
  bool record_trajectory = false;

  void validate() const;
};

/// Blurring self-updating clusterer (gamma-SUP).
///
/// Every point starts as its own representative x_i / tau. Each sweep replaces all
/// representatives at once (Jacobi order) by their weighted average under
/// w_ij = exp_{1-s}(-|y_i - y_j|^2). The loop stops when the largest displacement
/// drops below conv_eps or after max_iter sweeps (converged = false). Final
/// representatives closer than merge_eps (single linkage) form one cluster whose
/// center is tau times their mean.
ClusterResult gamma_sup(const DataMatrix& data, const GammaSupConfig& config);

/// Nonblurring estimator: representatives are pulled towards the fixed data
/// with w*_ij = exp_{1-s}(-|x_j - mu_i|^2 / tau^2). Same stopping and output rules.
ClusterResult gamma_nonblurring(const DataMatrix& data, const GammaSupConfig& config);

/// gamma-SUP followed by recursive 2-means bisection of every cluster larger than
/// size_threshold. Each bisection starts from the two mutually farthest members.
ClusterResult gamma_sup_plus(const DataMatrix& data, const GammaSupConfig& config,
                             std::size_t size_threshold);

/// Single-linkage grouping of representatives (scaled units) at radius merge_eps.
/// Labels are numbered by first occurrence; centers are scale * group mean.
ClusterResult extract_clusters(const DataMatrix& reps, double merge_eps, double scale);

}  // namespace gsup
