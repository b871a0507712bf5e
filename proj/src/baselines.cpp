#include "gsup/baselines.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gsup/error.hpp"
#include "gsup/kernels.hpp"
#include "gsup/rng.hpp"

namespace gsup {

namespace {

std::vector<Eigen::Index> lexicographic_order(const DataMatrix& data) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      if (data(a, c) != data(b, c)) return data(a, c) < data(b, c);
    }
    return false;
  });
  return order;
}

DataMatrix take_rows(const DataMatrix& data, const std::vector<Eigen::Index>& rows) {
  DataMatrix out(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = data.row(rows[r]);
  return out;
}

// k distinct row indices, uniformly at random (partial Fisher-Yates).
std::vector<Eigen::Index> sample_distinct(Eigen::Index n, int k, CounterRng& rng) {
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.index(static_cast<std::uint64_t>(n - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

// Best-of-n_init Lloyd on data already in canonical order.
KMeansResult kmeans_canonical(const DataMatrix& data, const KMeansConfig& cfg) {
  std::vector<KMeansResult> runs(static_cast<std::size_t>(cfg.n_init));
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int r = 0; r < cfg.n_init; ++r) {
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(r));
    const auto rows = sample_distinct(data.rows(), cfg.k, rng);
    runs[static_cast<std::size_t>(r)] = lloyd(data, take_rows(data, rows), cfg.max_iter);
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].wcss < runs[best].wcss) best = r;
  }
  return std::move(runs[best]);
}

}  // namespace

void KMeansConfig::validate() const {
  if (k < 1) throw DomainError("k must be >= 1");
  if (n_init < 1) throw DomainError("n_init must be >= 1");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (dismiss_threshold < 1) throw DomainError("dismiss_threshold must be >= 1");
  if (threads < 0) throw DomainError("threads must be >= 0");
}

double within_cluster_ss(const DataMatrix& data, const Labels& labels, int k) {
  DataMatrix sums = DataMatrix::Zero(k, data.cols());
  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    sums.row(labels[i]) += data.row(i);
    counts[static_cast<std::size_t>(labels[i])] += 1.0;
  }
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 0) sums.row(c) /= counts[static_cast<std::size_t>(c)];
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) acc += (data.row(i) - sums.row(labels[i])).squaredNorm();
  return acc;
}

KMeansResult lloyd(const DataMatrix& data, const DataMatrix& initial_centers, int max_iter) {
  const Eigen::Index n = data.rows();
  const Eigen::Index k = initial_centers.rows();
  if (k < 1 || k > n) throw DomainError("lloyd needs 1 <= k <= n");
  if (initial_centers.cols() != data.cols()) throw DimensionError("lloyd: center dimension mismatch");

  DataMatrix centers = initial_centers;
  Labels labels(static_cast<std::size_t>(n), -1);
  Labels previous;
  std::vector<double> dist2(static_cast<std::size_t>(n));
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k));
  KMeansResult out;

  for (int it = 0; it < max_iter; ++it) {
    kernels::assign_nearest_serial(data, centers, labels, dist2);
    // Empty clusters take the point farthest from its center.
    for (;;) {
      std::fill(sizes.begin(), sizes.end(), 0);
      for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
      const auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
      if (empty == sizes.end()) break;
      std::size_t far = dist2.size();
      for (std::size_t i = 0; i < dist2.size(); ++i) {
        if (sizes[static_cast<std::size_t>(labels[i])] < 2) continue;
        if (far == dist2.size() || dist2[i] > dist2[far]) far = i;
      }
      if (far == dist2.size()) break;  // unreachable for k <= n
      const auto e = static_cast<Eigen::Index>(empty - sizes.begin());
      centers.row(e) = data.row(static_cast<Eigen::Index>(far));
      labels[far] = static_cast<int>(e);
      dist2[far] = 0.0;
    }
    out.wcss_trace.push_back(std::accumulate(dist2.begin(), dist2.end(), 0.0));
    if (labels == previous) break;
    previous = labels;
    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centers.row(labels[i]) += data.row(i);
    for (Eigen::Index c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
  }

  out.clusters.labels = labels;
  out.clusters.centers = DataMatrix::Zero(k, data.cols());
  out.clusters.sizes.assign(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.clusters.centers.row(labels[i]) += data.row(i);
    ++out.clusters.sizes[static_cast<std::size_t>(labels[i])];
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    out.clusters.centers.row(c) /= static_cast<double>(out.clusters.sizes[static_cast<std::size_t>(c)]);
  }
  out.clusters.iterations = static_cast<int>(out.wcss_trace.size());
  out.clusters.converged = labels == previous;
  out.wcss = within_cluster_ss(data, labels, static_cast<int>(k));
  return out;
}

KMeansResult kmeans(const DataMatrix& data, const KMeansConfig& config) {
  config.validate();
  if (!data.allFinite()) throw InputError("data contains non-finite values");
  if (config.k > data.rows()) throw DomainError("k-means needs k <= n");
  const auto order = lexicographic_order(data);
  KMeansResult result = kmeans_canonical(take_rows(data, order), config);
  Labels labels(result.clusters.labels.size());
  for (std::size_t r = 0; r < order.size(); ++r) labels[static_cast<std::size_t>(order[r])] = result.clusters.labels[r];
  result.clusters.labels = std::move(labels);
  return result;
}

KMeansResult kmeans_plus(const DataMatrix& data, const KMeansConfig& config) {
  config.validate();
  if (!data.allFinite()) throw InputError("data contains non-finite values");
  if (config.k > data.rows()) throw DomainError("k-means+ needs k <= n");
  const auto order = lexicographic_order(data);
  const DataMatrix canon = take_rows(data, order);
  const auto n = static_cast<std::size_t>(canon.rows());

  std::vector<std::vector<Eigen::Index>> clusters;
  clusters.emplace_back(n);
  std::iota(clusters[0].begin(), clusters[0].end(), Eigen::Index{0});
  std::uint64_t split_count = 0;

  while (static_cast<int>(clusters.size()) < config.k) {
    auto largest = std::max_element(clusters.begin(), clusters.end(),
                                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    if (largest->size() < 2) break;
    std::vector<Eigen::Index> members = std::move(*largest);
    clusters.erase(largest);

    KMeansConfig two = config;
    two.k = 2;
    two.seed = config.seed + 0x9e3779b97f4a7c15ULL * ++split_count;
    const KMeansResult halves = kmeans_canonical(take_rows(canon, members), two);
    std::vector<Eigen::Index> left, right;
    for (std::size_t m = 0; m < members.size(); ++m) {
      (halves.clusters.labels[m] == 0 ? left : right).push_back(members[m]);
    }
    for (auto* child : {&left, &right}) {
      if (static_cast<int>(child->size()) >= config.dismiss_threshold) clusters.push_back(std::move(*child));
    }
    if (clusters.empty()) break;
  }

  KMeansResult result;
  const int k = static_cast<int>(clusters.size());
  if (k == 0) {
    // Everything was dismissed; fall back to a single cluster at the grand mean.
    KMeansConfig one = config;
    one.k = 1;
    one.n_init = 1;
    return kmeans(data, one);
  }
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  DataMatrix centers = DataMatrix::Zero(k, canon.cols());
  Labels canon_labels(n, -1);
  for (int c = 0; c < k; ++c) {
    for (auto i : clusters[static_cast<std::size_t>(c)]) {
      centers.row(c) += canon.row(i);
      canon_labels[static_cast<std::size_t>(i)] = c;
    }
    centers.row(c) /= static_cast<double>(clusters[static_cast<std::size_t>(c)].size());
  }
  // Dismissed points go to the nearest surviving center.
  for (std::size_t i = 0; i < n; ++i) {
    if (canon_labels[i] >= 0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      const double d2 = (canon.row(static_cast<Eigen::Index>(i)) - centers.row(c)).squaredNorm();
      if (d2 < best) {
        best = d2;
        canon_labels[i] = c;
      }
    }
  }
  result.clusters.labels.assign(n, -1);
  for (std::size_t r = 0; r < n; ++r) result.clusters.labels[static_cast<std::size_t>(order[r])] = canon_labels[r];
  result.clusters.sizes.assign(static_cast<std::size_t>(k), 0);
  result.clusters.centers = DataMatrix::Zero(k, data.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = result.clusters.labels[i];
    result.clusters.centers.row(c) += data.row(static_cast<Eigen::Index>(i));
    ++result.clusters.sizes[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    result.clusters.centers.row(c) /= static_cast<double>(result.clusters.sizes[static_cast<std::size_t>(c)]);
  }
  result.clusters.iterations = static_cast<int>(split_count);
  result.clusters.converged = k == config.k;
  result.wcss = within_cluster_ss(data, result.clusters.labels, k);
  return result;
}

GapResult gap_statistic(const DataMatrix& data, int k_max, int b_refs, std::uint64_t seed, int n_init,
                        int threads) {
  if (k_max < 1 || k_max > data.rows()) throw DomainError("gap statistic needs 1 <= k_max <= n");
  if (b_refs < 1) throw DomainError("gap statistic needs b_refs >= 1");
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  const Vector lo = data.colwise().minCoeff().transpose();
  const Vector hi = data.colwise().maxCoeff().transpose();
  constexpr double kFloor = 1e-300;

  auto log_wcss = [&](const DataMatrix& x, int k, std::uint64_t s) {
    KMeansConfig cfg;
    cfg.k = k;
    cfg.n_init = n_init;
    cfg.seed = s;
    cfg.threads = 1;
    return std::log(std::max(kmeans(x, cfg).wcss, kFloor));
  };

  GapResult out;
  out.log_wcss.resize(static_cast<std::size_t>(k_max));
  out.ref_log_wcss_mean.assign(static_cast<std::size_t>(k_max), 0.0);
  out.gap.resize(static_cast<std::size_t>(k_max));
  out.se.resize(static_cast<std::size_t>(k_max));
  std::vector<std::vector<double>> ref(static_cast<std::size_t>(b_refs), std::vector<double>(static_cast<std::size_t>(k_max)));

  for (int k = 1; k <= k_max; ++k) out.log_wcss[static_cast<std::size_t>(k - 1)] = log_wcss(data, k, seed);

  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int b = 0; b < b_refs; ++b) {
    CounterRng rng(seed, 1000003ULL + static_cast<std::uint64_t>(b));
    DataMatrix draw(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < p; ++c) draw(i, c) = rng.uniform(lo(c), hi(c));
    }
    for (int k = 1; k <= k_max; ++k) {
      ref[static_cast<std::size_t>(b)][static_cast<std::size_t>(k - 1)] =
          log_wcss(draw, k, seed ^ (0xa5a5a5a5ULL + static_cast<std::uint64_t>(b)));
    }
  }

  for (int k = 0; k < k_max; ++k) {
    double mean = 0.0;
    for (int b = 0; b < b_refs; ++b) mean += ref[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)];
    mean /= b_refs;
    double var = 0.0;
    for (int b = 0; b < b_refs; ++b) {
      const double d = ref[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] - mean;
      var += d * d;
    }
    var /= b_refs;
    out.ref_log_wcss_mean[static_cast<std::size_t>(k)] = mean;
    out.gap[static_cast<std::size_t>(k)] = mean - out.log_wcss[static_cast<std::size_t>(k)];
    out.se[static_cast<std::size_t>(k)] = std::sqrt(var) * std::sqrt(1.0 + 1.0 / b_refs);
  }

  out.selected_k = k_max;
  for (int k = 0; k + 1 < k_max; ++k) {
    if (out.gap[static_cast<std::size_t>(k)] >= out.gap[static_cast<std::size_t>(k + 1)] - out.se[static_cast<std::size_t>(k + 1)]) {
      out.selected_k = k + 1;
      break;
    }
  }
  return out;
}

}  // namespace gsup
