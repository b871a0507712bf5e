#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference and an
// OpenMP version; both compute each output row with the same fixed summation
// order over j, so the OpenMP results do not depend on the thread count.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gsup/types.hpp"

namespace gsup::kernels {

/// x^e for x in [0, 1]. Small integer exponents (1/s for the usual s) use repeated
/// squaring, which is several times cheaper than std::pow.
class PowerFn {
 public:
  explicit PowerFn(double e) : e_(e), n_(e >= 1.0 && e <= 1024.0 && e == std::floor(e) ? static_cast<unsigned>(e) : 0U) {}
  double operator()(double x) const {
    if (n_ == 0) return std::pow(x, e_);
    double result = 1.0;
    for (unsigned k = n_;; k >>= 1) {
      if (k & 1U) result *= x;
      if (k <= 1) break;
      x *= x;
    }
    return result;
  }

 private:
  double e_;
  unsigned n_;
};

/// exp_{1-s}(-d2) in scaled units: {1 - s d2}_+^{1/s}, exactly zero for d2 >= 1/s.
/// radius2 must be 1/s; it is passed in so callers can prune with it.
inline double scaled_weight(double d2, double s, double radius2, const PowerFn& power);

/// Candidate pairs for the OpenMP sweep kernels (a Verlet list).
///
/// Every row carries an anchor position. Row i lists, in ascending order, every data
/// row j whose anchor lies within radius + skin of its own. While no row has moved
/// more than skin / 2 from its anchor, every pair with nonzero weight is listed; the
/// kernels re-anchor rows that moved further and update only the pairs involving
/// them. Pairs left out have weight exactly zero, so results equal those of the
/// full loop bit for bit.
class NeighborList {
 public:
  void invalidate() { built_ = false; }
  bool built() const { return built_; }
  bool dense() const { return dense_; }
  int rebuilds() const { return rebuilds_; }

  /// Follows a fold of identical rows: old row r becomes row new_row[r]. Only valid
  /// for the blurring sweep, where reps and data are the same rows.
  void fold(std::span<const Eigen::Index> new_row, Eigen::Index new_count);

  /// Makes the list valid for reps against data at the given support radius.
  /// `shared` means data and reps are the same rows (blurring).
  void ensure(const DataMatrix& reps, const DataMatrix& data, bool shared, double radius, int threads);

  std::span<const Eigen::Index> row(Eigen::Index i) const { return lists_[static_cast<std::size_t>(i)]; }

 private:
  void rebuild(const DataMatrix& reps, const DataMatrix& data, bool shared, double radius, int threads);
  bool in_reach(const double* a, const double* b, Eigen::Index p) const;

  DataMatrix anchor_;
  Eigen::Index data_rows_ = 0;
  Eigen::Index key_ = 0;
  double radius_ = 0.0;
  double skin_ = 0.0;
  double reach2_ = 0.0;
  bool built_ = false;
  bool dense_ = false;
  int rebuilds_ = 0;
  std::vector<std::vector<Eigen::Index>> lists_;
};

/// One Jacobi sweep of the self-updating process in scaled units.
///
/// out_i = sum_j m_j w(|y_i - y_j|^2) y_j / sum_j m_j w(|y_i - y_j|^2) with y = reps.
/// `mass` holds per-row multiplicities; empty means all ones. Returns the maximum
/// Euclidean displacement |out_i - y_i|.
double blurring_sweep_serial(const DataMatrix& reps, std::span<const double> mass, double s,
                             DataMatrix& out);
double blurring_sweep_omp(const DataMatrix& reps, std::span<const double> mass, double s,
                          DataMatrix& out, int threads = 0, NeighborList* neighbors = nullptr);

/// Nonblurring sweep: representatives move, the (scaled) data stay fixed.
double nonblurring_sweep_serial(const DataMatrix& reps, const DataMatrix& data, double s,
                                DataMatrix& out);
double nonblurring_sweep_omp(const DataMatrix& reps, const DataMatrix& data, double s,
                             DataMatrix& out, int threads = 0, NeighborList* neighbors = nullptr);

/// Index of the nearest center for every row and the squared distance to it.
/// Ties go to the lowest center index.
void assign_nearest_serial(const DataMatrix& data, const DataMatrix& centers, std::span<int> labels,
                           std::span<double> dist2);
void assign_nearest_omp(const DataMatrix& data, const DataMatrix& centers, std::span<int> labels,
                        std::span<double> dist2, int threads = 0);

/// Squared distance from every row to its nearest other row (+inf when n = 1).
Vector nearest_neighbor_dist2_serial(const DataMatrix& data);
Vector nearest_neighbor_dist2_omp(const DataMatrix& data, int threads = 0);

/// Largest squared pairwise distance (the squared diameter).
double max_pair_dist2_serial(const DataMatrix& data);
double max_pair_dist2_omp(const DataMatrix& data, int threads = 0);

inline double scaled_weight(double d2, double s, double radius2, const PowerFn& power) {
  if (d2 >= radius2) return 0.0;
  const double base = 1.0 - s * d2;
  return base > 0.0 ? power(base) : 0.0;
}

}  // namespace gsup::kernels
