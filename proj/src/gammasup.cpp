#include "gsup/gammasup.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <vector>

#include "gsup/baselines.hpp"
#include "gsup/error.hpp"
#include "gsup/kernels.hpp"

namespace gsup {

namespace {

void check_finite(const DataMatrix& data) {
  if (data.rows() < 1) throw InputError("clustering needs at least one observation");
  if (!data.allFinite()) throw InputError("data contains non-finite values");
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool rows_equal(const DataMatrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (m(a, c) != m(b, c)) return false;
  }
  return true;
}

// Distinct rows of a representative set together with their multiplicities.
struct Collapsed {
  DataMatrix rows;
  std::vector<double> mass;
  std::vector<Eigen::Index> owner;  // original point -> row
};

Collapsed collapse_rows(const DataMatrix& reps) {
  const Eigen::Index n = reps.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < reps.cols(); ++c) {
      if (reps(a, c) != reps(b, c)) return reps(a, c) < reps(b, c);
    }
    return false;
  });
  // Group leader = smallest index among equal rows (stable sort keeps index order).
  std::vector<Eigen::Index> leader(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < order.size(); ++k) {
    leader[order[k]] = (k > 0 && rows_equal(reps, order[k - 1], order[k])) ? leader[order[k - 1]] : order[k];
  }
  Collapsed out;
  out.owner.assign(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> firsts;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index l = leader[i];
    if (slot[l] < 0) {
      slot[l] = static_cast<Eigen::Index>(firsts.size());
      firsts.push_back(l);
      out.mass.push_back(0.0);
    }
    out.owner[i] = slot[l];
    out.mass[slot[l]] += 1.0;
  }
  out.rows.resize(static_cast<Eigen::Index>(firsts.size()), reps.cols());
  for (std::size_t k = 0; k < firsts.size(); ++k) out.rows.row(static_cast<Eigen::Index>(k)) = reps.row(firsts[k]);
  return out;
}

DataMatrix expand(const Collapsed& c) {
  DataMatrix full(static_cast<Eigen::Index>(c.owner.size()), c.rows.cols());
  for (std::size_t i = 0; i < c.owner.size(); ++i) full.row(static_cast<Eigen::Index>(i)) = c.rows.row(c.owner[i]);
  return full;
}

double blurring_step(const DataMatrix& reps, std::span<const double> mass, const GammaSupConfig& cfg,
                     DataMatrix& out, kernels::NeighborList& neighbors) {
  if (cfg.serial_reference) return kernels::blurring_sweep_serial(reps, mass, cfg.params.s, out);
  return kernels::blurring_sweep_omp(reps, mass, cfg.params.s, out, cfg.threads, &neighbors);
}

ClusterResult finish(const DataMatrix& reps, const GammaSupConfig& cfg, int iterations, bool converged,
                     std::vector<DataMatrix> trajectory) {
  ClusterResult result = extract_clusters(reps, cfg.merge_eps, cfg.params.tau);
  result.iterations = iterations;
  result.converged = converged;
  result.trajectory = std::move(trajectory);
  return result;
}

}  // namespace

void GammaSupConfig::validate() const {
  params.validate();
  if (!(conv_eps > 0.0)) throw DomainError("conv_eps must be > 0");
  if (!(merge_eps >= conv_eps)) throw DomainError("merge_eps must be >= conv_eps");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (threads < 0) throw DomainError("threads must be >= 0");
}

ClusterResult extract_clusters(const DataMatrix& reps, double merge_eps, double scale) {
  const Eigen::Index n = reps.rows();
  const Eigen::Index p = reps.cols();
  DisjointSets sets(static_cast<std::size_t>(n));
  const double eps2 = merge_eps * merge_eps;

  // Sweep along the first coordinate; only pairs within merge_eps there can link.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (p > 0) {
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return reps(a, 0) < reps(b, 0); });
  }
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (p > 0 && reps(order[b], 0) - reps(order[a], 0) >= merge_eps) break;
      if ((reps.row(order[a]) - reps.row(order[b])).squaredNorm() < eps2) {
        sets.unite(static_cast<std::size_t>(order[a]), static_cast<std::size_t>(order[b]));
      }
    }
  }

  ClusterResult result;
  result.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(n), -1);
  int k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t r = sets.find(static_cast<std::size_t>(i));
    if (root_label[r] < 0) root_label[r] = k++;
    result.labels[i] = root_label[r];
  }
  result.sizes.assign(static_cast<std::size_t>(k), 0);
  result.centers = DataMatrix::Zero(k, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int l = result.labels[i];
    result.centers.row(l) += reps.row(i);
    ++result.sizes[l];
  }
  for (int l = 0; l < k; ++l) result.centers.row(l) *= scale / static_cast<double>(result.sizes[l]);
  return result;
}

ClusterResult gamma_sup(const DataMatrix& data, const GammaSupConfig& config) {
  config.validate();
  check_finite(data);
  const double tau = config.params.tau;
  std::vector<DataMatrix> trajectory;
  DataMatrix next;
  kernels::NeighborList neighbors;
  int iter = 0;
  bool converged = false;

  if (config.collapse_duplicates) {
    Collapsed state = collapse_rows(data / tau);
    while (iter < config.max_iter) {
      if (config.record_trajectory) trajectory.push_back(expand(state) * tau);
      const double disp = blurring_step(state.rows, state.mass, config, next, neighbors);
      ++iter;
      // Rows that became identical are folded; groups never split.
      Collapsed folded = collapse_rows(next);
      if (folded.rows.rows() != next.rows()) neighbors.fold(folded.owner, folded.rows.rows());
      for (auto& o : state.owner) o = folded.owner[static_cast<std::size_t>(o)];
      state.rows = std::move(folded.rows);
      state.mass.assign(static_cast<std::size_t>(state.rows.rows()), 0.0);
      for (auto o : state.owner) state.mass[static_cast<std::size_t>(o)] += 1.0;
      if (disp < config.conv_eps) {
        converged = true;
        break;
      }
    }
    DataMatrix final_reps = expand(state);
    if (config.record_trajectory) trajectory.push_back(final_reps * tau);
    return finish(final_reps, config, iter, converged, std::move(trajectory));
  }

  DataMatrix reps = data / tau;
  while (iter < config.max_iter) {
    if (config.record_trajectory) trajectory.push_back(reps * tau);
    const double disp = blurring_step(reps, {}, config, next, neighbors);
    ++iter;
    reps.swap(next);
    if (disp < config.conv_eps) {
      converged = true;
      break;
    }
  }
  if (config.record_trajectory) trajectory.push_back(reps * tau);
  return finish(reps, config, iter, converged, std::move(trajectory));
}

ClusterResult gamma_nonblurring(const DataMatrix& data, const GammaSupConfig& config) {
  config.validate();
  check_finite(data);
  const double tau = config.params.tau;
  const DataMatrix scaled = data / tau;
  DataMatrix reps = scaled;
  DataMatrix next;
  kernels::NeighborList neighbors;
  std::vector<DataMatrix> trajectory;
  int iter = 0;
  bool converged = false;
  while (iter < config.max_iter) {
    if (config.record_trajectory) trajectory.push_back(reps * tau);
    const double disp = config.serial_reference
                            ? kernels::nonblurring_sweep_serial(reps, scaled, config.params.s, next)
                            : kernels::nonblurring_sweep_omp(reps, scaled, config.params.s, next, config.threads, &neighbors);
    ++iter;
    reps.swap(next);
    if (disp < config.conv_eps) {
      converged = true;
      break;
    }
  }
  if (config.record_trajectory) trajectory.push_back(reps * tau);
  return finish(reps, config, iter, converged, std::move(trajectory));
}

ClusterResult gamma_sup_plus(const DataMatrix& data, const GammaSupConfig& config, std::size_t size_threshold) {
  if (size_threshold < 2) throw DomainError("size_threshold must be >= 2");
  ClusterResult base = gamma_sup(data, config);
  const std::size_t n = static_cast<std::size_t>(data.rows());
  const Eigen::Index p = data.cols();

  struct Group {
    std::vector<Eigen::Index> members;
    Vector center;
  };
  std::vector<std::vector<Eigen::Index>> members(base.num_clusters());
  for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(base.labels[i])].push_back(static_cast<Eigen::Index>(i));

  std::vector<Group> done;
  std::deque<Group> pending;
  for (std::size_t k = 0; k < members.size(); ++k) {
    pending.push_back(Group{std::move(members[k]), base.centers.row(static_cast<Eigen::Index>(k)).transpose()});
  }
  bool split_any = false;
  while (!pending.empty()) {
    Group g = std::move(pending.front());
    pending.pop_front();
    if (g.members.size() <= size_threshold) {
      done.push_back(std::move(g));
      continue;
    }
    DataMatrix sub(static_cast<Eigen::Index>(g.members.size()), p);
    for (std::size_t m = 0; m < g.members.size(); ++m) sub.row(static_cast<Eigen::Index>(m)) = data.row(g.members[m]);
    // Seed 2-means at the mutually farthest pair (first such pair in index order).
    Eigen::Index fa = 0, fb = 0;
    double best = -1.0;
    for (Eigen::Index a = 0; a < sub.rows(); ++a) {
      for (Eigen::Index b = a + 1; b < sub.rows(); ++b) {
        const double d2 = (sub.row(a) - sub.row(b)).squaredNorm();
        if (d2 > best) {
          best = d2;
          fa = a;
          fb = b;
        }
      }
    }
    if (!(best > 0.0)) {  // all members coincide; nothing to split
      done.push_back(std::move(g));
      continue;
    }
    DataMatrix init(2, p);
    init.row(0) = sub.row(fa);
    init.row(1) = sub.row(fb);
    KMeansResult halves = lloyd(sub, init, 300);
    if (halves.clusters.num_clusters() < 2 || halves.clusters.sizes[0] == 0 || halves.clusters.sizes[1] == 0) {
      done.push_back(std::move(g));
      continue;
    }
    split_any = true;
    Group left, right;
    for (std::size_t m = 0; m < g.members.size(); ++m) {
      (halves.clusters.labels[m] == 0 ? left : right).members.push_back(g.members[m]);
    }
    left.center = halves.clusters.centers.row(0).transpose();
    right.center = halves.clusters.centers.row(1).transpose();
    pending.push_back(std::move(left));
    pending.push_back(std::move(right));
  }
  if (!split_any) return base;

  // Renumber by smallest member index so labels follow first occurrence.
  std::sort(done.begin(), done.end(), [](const Group& a, const Group& b) { return a.members.front() < b.members.front(); });
  ClusterResult result;
  result.labels.assign(n, -1);
  result.centers.resize(static_cast<Eigen::Index>(done.size()), p);
  result.sizes.resize(done.size());
  for (std::size_t k = 0; k < done.size(); ++k) {
    for (auto i : done[k].members) result.labels[static_cast<std::size_t>(i)] = static_cast<int>(k);
    result.centers.row(static_cast<Eigen::Index>(k)) = done[k].center.transpose();
    result.sizes[k] = done[k].members.size();
  }
  result.iterations = base.iterations;
  result.converged = base.converged;
  result.trajectory = std::move(base.trajectory);
  return result;
}

}  // namespace gsup
