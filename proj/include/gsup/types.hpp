#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace gsup {

/// n observations x p features, row-major so that each observation is contiguous.
using DataMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Output of every clusterer in the library.
///
/// Labels are 0-based cluster ids in [0, K). Centers are in data units, one row per
/// cluster. The trajectory is only filled when explicitly requested and holds the
/// representatives (data units) before each sweep plus the final state.
struct ClusterResult {
  Labels labels;
  DataMatrix centers;
  std::vector<std::size_t> sizes;
  int iterations = 0;
  bool converged = false;
  std::vector<DataMatrix> trajectory;

  std::size_t num_clusters() const { return sizes.size(); }
};

}  // namespace gsup
