// Serial reference kernels. Written for clarity; used to validate the OpenMP
// kernels and as the single-threaded baseline in the benchmark.

#include <algorithm>
#include <limits>

#include "gsup/kernels.hpp"

namespace gsup::kernels {

namespace {

// out_i = sum_j m_j w_ij x_j / sum_j m_j w_ij with w_ij computed against reps_i.
double weighted_mean_update(const DataMatrix& reps, const DataMatrix& data,
                            std::span<const double> mass, double s, DataMatrix& out) {
  const double radius2 = 1.0 / s;
  const PowerFn power(1.0 / s);
  out.resize(reps.rows(), reps.cols());
  double max_disp = 0.0;
  for (Eigen::Index i = 0; i < reps.rows(); ++i) {
    Vector num = Vector::Zero(reps.cols());
    double den = 0.0;
    for (Eigen::Index j = 0; j < data.rows(); ++j) {
      double w = scaled_weight((data.row(j) - reps.row(i)).squaredNorm(), s, radius2, power);
      if (w == 0.0) continue;
      if (!mass.empty()) w *= mass[j];
      num += w * data.row(j).transpose();
      den += w;
    }
    // den == 0 only when no data point lies inside the support; stay put.
    if (den > 0.0) {
      out.row(i) = (num / den).transpose();
    } else {
      out.row(i) = reps.row(i);
    }
    max_disp = std::max(max_disp, (out.row(i) - reps.row(i)).norm());
  }
  return max_disp;
}

}  // namespace

double blurring_sweep_serial(const DataMatrix& reps, std::span<const double> mass, double s,
                             DataMatrix& out) {
  return weighted_mean_update(reps, reps, mass, s, out);
}

double nonblurring_sweep_serial(const DataMatrix& reps, const DataMatrix& data, double s,
                                DataMatrix& out) {
  return weighted_mean_update(reps, data, {}, s, out);
}

void assign_nearest_serial(const DataMatrix& data, const DataMatrix& centers, std::span<int> labels,
                           std::span<double> dist2) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index k = 0; k < centers.rows(); ++k) {
      const double d2 = (data.row(i) - centers.row(k)).squaredNorm();
      if (d2 < best) {
        best = d2;
        arg = static_cast<int>(k);
      }
    }
    labels[i] = arg;
    dist2[i] = best;
  }
}

Vector nearest_neighbor_dist2_serial(const DataMatrix& data) {
  Vector nn = Vector::Constant(data.rows(), std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.rows(); ++j) {
      if (i != j) nn(i) = std::min(nn(i), (data.row(i) - data.row(j)).squaredNorm());
    }
  }
  return nn;
}

double max_pair_dist2_serial(const DataMatrix& data) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < data.rows(); ++j) {
      best = std::max(best, (data.row(i) - data.row(j)).squaredNorm());
    }
  }
  return best;
}

}  // namespace gsup::kernels
