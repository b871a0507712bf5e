#include <omp.h>

#include <cmath>

#include <algorithm>
#include <iterator>
#include <limits>
#include <vector>

#include "gsup/kernels.hpp"

namespace gsup::kernels {

namespace {

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

inline double sq_dist(const double* a, const double* b, Eigen::Index p) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < p; ++c) {
    const double d = a[c] - b[c];
    acc += d * d;
  }
  return acc;
}

// Squared distance abandoned once it reaches `limit`. Partial sums of nonnegative
// terms never decrease under rounding, so an abandoned pair is one whose full
// distance would also be >= limit.
// Sums in the same order as sq_dist but gives up, once per block of four terms,
// as soon as the partial sum reaches limit.
inline double sq_dist_bounded(const double* a, const double* b, Eigen::Index p, double limit) {
  double acc = 0.0;
  Eigen::Index c = 0;
  for (; c + 4 <= p; c += 4) {
    const double d0 = a[c] - b[c];
    const double d1 = a[c + 1] - b[c + 1];
    const double d2 = a[c + 2] - b[c + 2];
    const double d3 = a[c + 3] - b[c + 3];
    acc += d0 * d0;
    acc += d1 * d1;
    acc += d2 * d2;
    acc += d3 * d3;
    if (acc >= limit) return acc;
  }
  for (; c < p; ++c) {
    const double d = a[c] - b[c];
    acc += d * d;
  }
  return acc;
}

Eigen::Index widest_column(const DataMatrix& m) {
  Eigen::Index best = 0;
  double best_range = -1.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double range = m.col(c).maxCoeff() - m.col(c).minCoeff();
    if (range > best_range) {
      best_range = range;
      best = c;
    }
  }
  return best;
}

// Skin of the neighbor list as a fraction of the support radius.
constexpr double kSkinFraction = 0.25;
// Above this fill ratio the list costs more than it saves.
constexpr double kDenseFill = 0.3;
constexpr Eigen::Index kFillProbes = 64;

// m_j w_ij accumulated over the candidates js (ascending). Candidates are taken
// four at a time so that their independent distance sums overlap; each distance is
// still summed over c in order, and a zero weight adds exactly nothing, so the
// result is that of the plain one-pair-at-a-time loop.
void accumulate(const double* __restrict yi, const DataMatrix& data, const double* mass, double s, double radius2,
                const PowerFn& power, const std::vector<Eigen::Index>& js, double* __restrict num, double& den) {
  const Eigen::Index p = data.cols();
  const double* base = data.data();
  const std::size_t count = js.size();
  std::size_t t = 0;
  for (; t + 4 <= count; t += 4) {
    const double* x0 = base + js[t] * p;
    const double* x1 = base + js[t + 1] * p;
    const double* x2 = base + js[t + 2] * p;
    const double* x3 = base + js[t + 3] * p;
    double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
    for (Eigen::Index c = 0; c < p; ++c) {
      const double e0 = yi[c] - x0[c];
      const double e1 = yi[c] - x1[c];
      const double e2 = yi[c] - x2[c];
      const double e3 = yi[c] - x3[c];
      d0 += e0 * e0;
      d1 += e1 * e1;
      d2 += e2 * e2;
      d3 += e3 * e3;
    }
    double w0 = scaled_weight(d0, s, radius2, power);
    double w1 = scaled_weight(d1, s, radius2, power);
    double w2 = scaled_weight(d2, s, radius2, power);
    double w3 = scaled_weight(d3, s, radius2, power);
    if (w0 == 0.0 && w1 == 0.0 && w2 == 0.0 && w3 == 0.0) continue;
    if (mass) {
      w0 *= mass[js[t]];
      w1 *= mass[js[t + 1]];
      w2 *= mass[js[t + 2]];
      w3 *= mass[js[t + 3]];
    }
    for (Eigen::Index c = 0; c < p; ++c) num[c] = (((num[c] + w0 * x0[c]) + w1 * x1[c]) + w2 * x2[c]) + w3 * x3[c];
    den = (((den + w0) + w1) + w2) + w3;
  }
  for (; t < count; ++t) {
    const double* xj = base + js[t] * p;
    double w = scaled_weight(sq_dist_bounded(yi, xj, p, radius2), s, radius2, power);
    if (w == 0.0) continue;
    if (mass) w *= mass[js[t]];
    for (Eigen::Index c = 0; c < p; ++c) num[c] += w * xj[c];
    den += w;
  }
}

// Candidates j of row yi that survive the one-coordinate test, ascending.
template <typename Js>
void gather(const double* yi, const DataMatrix& data, double radius2, Eigen::Index key, const Js& js,
            std::vector<Eigen::Index>& out) {
  const Eigen::Index p = data.cols();
  const double* col = data.data() + key;
  out.clear();
  for (const Eigen::Index j : js) {
    const double dk = yi[key] - col[j * p];
    if (dk * dk < radius2) out.push_back(j);
  }
}

struct IndexRange {
  Eigen::Index n;
  struct It {
    Eigen::Index v;
    Eigen::Index operator*() const { return v; }
    It& operator++() {
      ++v;
      return *this;
    }
    bool operator!=(const It& o) const { return v != o.v; }
  };
  It begin() const { return {0}; }
  It end() const { return {n}; }
};

double weighted_mean_update(const DataMatrix& reps, const DataMatrix& data, const double* mass,
                            double s, DataMatrix& out, int threads, NeighborList* neighbors) {
  const Eigen::Index n = reps.rows();
  const Eigen::Index p = reps.cols();
  const double radius2 = 1.0 / s;
  const PowerFn power(1.0 / s);
  out.resize(n, p);
  if (n == 0) return 0.0;
  if (neighbors) neighbors->ensure(reps, data, &reps == &data, std::sqrt(radius2), threads);
  const bool use_list = neighbors && !neighbors->dense();
  // One coordinate alone already rules out most pairs whose weight is zero.
  const Eigen::Index key = widest_column(data);
  double max_disp2 = 0.0;

#pragma omp parallel num_threads(resolve_threads(threads)) reduction(max : max_disp2)
  {
    std::vector<double> num(static_cast<std::size_t>(p));
    std::vector<Eigen::Index> candidates;
#pragma omp for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* yi = reps.data() + i * p;
      std::fill(num.begin(), num.end(), 0.0);
      double den = 0.0;
      if (use_list) {
        gather(yi, data, radius2, key, neighbors->row(i), candidates);
      } else {
        gather(yi, data, radius2, key, IndexRange{data.rows()}, candidates);
      }
      accumulate(yi, data, mass, s, radius2, power, candidates, num.data(), den);
      double* zi = out.data() + i * p;
      double disp2 = 0.0;
      for (Eigen::Index c = 0; c < p; ++c) {
        zi[c] = den > 0.0 ? num[c] / den : yi[c];
        const double d = zi[c] - yi[c];
        disp2 += d * d;
      }
      max_disp2 = std::max(max_disp2, disp2);
    }
  }
  return std::sqrt(max_disp2);
}

}  // namespace

bool NeighborList::in_reach(const double* a, const double* b, Eigen::Index p) const {
  const double dk = a[key_] - b[key_];
  return dk * dk < reach2_ && sq_dist_bounded(a, b, p, reach2_) < reach2_;
}

void NeighborList::rebuild(const DataMatrix& reps, const DataMatrix& data, bool shared, double radius,
                           int threads) {
  anchor_ = reps;
  data_rows_ = data.rows();
  radius_ = radius;
  skin_ = kSkinFraction * radius;
  reach2_ = (radius + skin_) * (radius + skin_);
  key_ = widest_column(data);
  built_ = true;
  ++rebuilds_;

  const Eigen::Index n = reps.rows();
  const Eigen::Index m = data.rows();
  const Eigen::Index p = reps.cols();
  const double* targets = shared ? anchor_.data() : data.data();

  // Evenly spaced sample rows decide whether a list is worth building at all.
  const Eigen::Index probes = std::min<Eigen::Index>(n, kFillProbes);
  std::size_t hits = 0;
  for (Eigen::Index t = 0; t < probes; ++t) {
    const double* yi = anchor_.data() + (t * n / probes) * p;
    for (Eigen::Index j = 0; j < m; ++j) hits += in_reach(yi, targets + j * p, p) ? 1 : 0;
  }
  dense_ = static_cast<double>(hits) > kDenseFill * static_cast<double>(probes) * static_cast<double>(m);
  lists_.assign(dense_ ? 0 : static_cast<std::size_t>(n), {});
  if (dense_) return;

#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_threads(threads))
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* yi = anchor_.data() + i * p;
    auto& r = lists_[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m; ++j) {
      if (in_reach(yi, targets + j * p, p)) r.push_back(j);
    }
  }
}

void NeighborList::ensure(const DataMatrix& reps, const DataMatrix& data, bool shared, double radius,
                          int threads) {
  if (!built_ || anchor_.rows() != reps.rows() || anchor_.cols() != reps.cols() || data_rows_ != data.rows() ||
      radius_ != radius) {
    rebuild(reps, data, shared, radius, threads);
    return;
  }
  const Eigen::Index n = reps.rows();
  const Eigen::Index p = reps.cols();
  const double half2 = 0.25 * skin_ * skin_;
  std::vector<Eigen::Index> moved;
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((reps.row(i) - anchor_.row(i)).squaredNorm() >= half2) moved.push_back(i);
  }
  if (moved.empty()) return;
  if (dense_ || moved.size() * 4 > static_cast<std::size_t>(n)) {
    rebuild(reps, data, shared, radius, threads);
    return;
  }

  std::vector<char> is_moved(static_cast<std::size_t>(n), 0);
  for (const Eigen::Index i : moved) {
    anchor_.row(i) = reps.row(i);
    is_moved[static_cast<std::size_t>(i)] = 1;
  }
  const Eigen::Index m = data.rows();
  const double* targets = shared ? anchor_.data() : data.data();
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_threads(threads))
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* yi = anchor_.data() + i * p;
    auto& r = lists_[static_cast<std::size_t>(i)];
    if (is_moved[static_cast<std::size_t>(i)]) {
      r.clear();
      for (Eigen::Index j = 0; j < m; ++j) {
        if (in_reach(yi, targets + j * p, p)) r.push_back(j);
      }
    } else if (shared) {
      // Drop and re-test the moved rows only; moved is ascending, so a merge keeps order.
      std::vector<Eigen::Index> kept;
      kept.reserve(r.size());
      for (const Eigen::Index j : r) {
        if (!is_moved[static_cast<std::size_t>(j)]) kept.push_back(j);
      }
      std::vector<Eigen::Index> added;
      for (const Eigen::Index j : moved) {
        if (in_reach(yi, targets + j * p, p)) added.push_back(j);
      }
      r.clear();
      std::merge(kept.begin(), kept.end(), added.begin(), added.end(), std::back_inserter(r));
    }
  }
}

void NeighborList::fold(std::span<const Eigen::Index> new_row, Eigen::Index new_count) {
  if (!built_) return;
  // Each new row keeps the anchor and list of its first old row; merged rows sit
  // at the same point, so that list covers the merged row as well.
  std::vector<Eigen::Index> first(static_cast<std::size_t>(new_count), -1);
  for (std::size_t r = 0; r < new_row.size(); ++r) {
    auto& f = first[static_cast<std::size_t>(new_row[r])];
    if (f < 0) f = static_cast<Eigen::Index>(r);
  }
  DataMatrix anchor(new_count, anchor_.cols());
  for (Eigen::Index k = 0; k < new_count; ++k) anchor.row(k) = anchor_.row(first[static_cast<std::size_t>(k)]);
  anchor_ = std::move(anchor);
  data_rows_ = new_count;
  if (dense_) return;

  std::vector<std::vector<Eigen::Index>> lists(static_cast<std::size_t>(new_count));
  for (Eigen::Index k = 0; k < new_count; ++k) {
    auto& r = lists[static_cast<std::size_t>(k)];
    for (const Eigen::Index j : lists_[static_cast<std::size_t>(first[static_cast<std::size_t>(k)])]) {
      r.push_back(new_row[static_cast<std::size_t>(j)]);
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  lists_ = std::move(lists);
}

double blurring_sweep_omp(const DataMatrix& reps, std::span<const double> mass, double s,
                          DataMatrix& out, int threads, NeighborList* neighbors) {
  return weighted_mean_update(reps, reps, mass.empty() ? nullptr : mass.data(), s, out, threads, neighbors);
}

double nonblurring_sweep_omp(const DataMatrix& reps, const DataMatrix& data, double s,
                             DataMatrix& out, int threads, NeighborList* neighbors) {
  return weighted_mean_update(reps, data, nullptr, s, out, threads, neighbors);
}

void assign_nearest_omp(const DataMatrix& data, const DataMatrix& centers, std::span<int> labels,
                        std::span<double> dist2, int threads) {
  const Eigen::Index n = data.rows();
  const Eigen::Index k = centers.rows();
  const Eigen::Index p = data.cols();
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* xi = data.data() + i * p;
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double d2 = sq_dist(xi, centers.data() + c * p, p);
      if (d2 < best) {
        best = d2;
        arg = static_cast<int>(c);
      }
    }
    labels[i] = arg;
    dist2[i] = best;
  }
}

Vector nearest_neighbor_dist2_omp(const DataMatrix& data, int threads) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  Vector nn(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_threads(threads))
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* xi = data.data() + i * p;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, sq_dist_bounded(xi, data.data() + j * p, p, best));
    }
    nn(i) = best;
  }
  return nn;
}

double max_pair_dist2_omp(const DataMatrix& data, int threads) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) num_threads(resolve_threads(threads))
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* xi = data.data() + i * p;
    for (Eigen::Index j = i + 1; j < n; ++j) best = std::max(best, sq_dist(xi, data.data() + j * p, p));
  }
  return best;
}

}  // namespace gsup::kernels
