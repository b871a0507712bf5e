#pragma once

#include <cstdint>
#include <vector>

#include "gsup/types.hpp"

namespace gsup {

struct KMeansConfig {
  int k = 2;
  /// Random restarts; the best run by within-cluster sum of squares is kept.
  int n_init = 10;
  int max_iter = 300;
  std::uint64_t seed = 0;
  /// k-means+ only: children smaller than this are dismissed.
  int dismiss_threshold = 30;
  /// 0 uses the OpenMP default; restarts are spread over the workers.
  int threads = 0;

  void validate() const;
};

struct KMeansResult {
  ClusterResult clusters;
  /// Within-cluster sum of squares of the returned partition.
  double wcss = 0.0;
  /// WCSS after each assignment step of the winning restart.
  std::vector<double> wcss_trace;
};

/// Lloyd iterations from the given initial centers. Empty clusters are reseeded
/// with the point farthest from its current center.
KMeansResult lloyd(const DataMatrix& data, const DataMatrix& initial_centers, int max_iter);

/// Best-of-n_init Lloyd k-means with uniformly random distinct initial rows.
/// Rows are put in lexicographic order before seeding, so the result does not
/// depend on the input row order.
KMeansResult kmeans(const DataMatrix& data, const KMeansConfig& config);

/// Bisecting k-means with small-cluster dismissal (Euclidean CL2D variant).
///
/// Starting from one cluster, the largest cluster is split by 2-means until k
/// clusters exist. A child smaller than dismiss_threshold is dismissed and the
/// largest cluster is split again. Dismissed points are attached to the nearest
/// surviving center at the end. Fewer than k clusters are returned when the data
/// cannot support k.
KMeansResult kmeans_plus(const DataMatrix& data, const KMeansConfig& config);

struct GapResult {
  int selected_k = 1;
  /// Index k-1 holds the value for k clusters.
  std::vector<double> gap;
  std::vector<double> se;
  std::vector<double> log_wcss;
  std::vector<double> ref_log_wcss_mean;
};

/// Gap statistic with a uniform reference over the bounding box of the data and
/// the one-standard-error rule: the smallest k with gap(k) >= gap(k+1) - se(k+1).
GapResult gap_statistic(const DataMatrix& data, int k_max, int b_refs, std::uint64_t seed,
                        int n_init = 10, int threads = 0);

/// Within-cluster sum of squares of a labelled partition around its own means.
double within_cluster_ss(const DataMatrix& data, const Labels& labels, int k);

}  // namespace gsup
