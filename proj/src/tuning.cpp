#include "gsup/tuning.hpp"

#include <omp.h>

#include <cmath>

#include "gsup/error.hpp"
#include "gsup/kernels.hpp"

namespace gsup {

std::vector<double> log_grid(double lo, double hi, int points) {
  if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw DomainError("log grid needs points >= 1 and 0 < lo <= hi");
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  grid.back() = hi;
  return grid;
}

std::vector<double> default_tau_grid(const DataMatrix& data, int points, int threads) {
  if (data.rows() < 2) throw DomainError("default tau grid needs at least two observations");
  const Vector nn = kernels::nearest_neighbor_dist2_omp(data, threads).cwiseSqrt();
  const double mean_nn = nn.mean();
  const double diameter = std::sqrt(kernels::max_pair_dist2_omp(data, threads));
  if (!(mean_nn > 0.0)) throw DomainError("default tau grid: all observations coincide");
  return log_grid(0.1 * mean_nn, 2.0 * diameter, points);
}

void detect_phases(TauScanResult& scan, std::size_t n) {
  scan.transition_tau.reset();
  scan.plateau.reset();
  scan.recommended_tau.reset();
  std::size_t start = scan.counts.size();
  for (std::size_t i = 0; i < scan.counts.size(); ++i) {
    if (scan.counts[i] < n) {
      scan.transition_tau = scan.taus[i];
      start = i;
      break;
    }
  }
  for (std::size_t i = start; i < scan.counts.size();) {
    std::size_t j = i;
    while (j + 1 < scan.counts.size() && scan.counts[j + 1] == scan.counts[i]) ++j;
    const std::size_t k = scan.counts[i];
    const Plateau run{i, j, k};
    if (k != 1 && k != n && run.length() >= kMinPlateauLength &&
        (!scan.plateau || run.length() > scan.plateau->length())) {
      scan.plateau = run;
    }
    i = j + 1;
  }
  if (scan.plateau) scan.recommended_tau = scan.taus[scan.plateau->first];
}

TauScanResult scan_tau(const DataMatrix& data, double s, const std::vector<double>& taus, const GammaSupConfig& base) {
  if (taus.empty()) throw DomainError("tau grid is empty");
  if (data.rows() < 1 || !data.allFinite()) throw InputError("scan_tau needs non-empty finite data");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0)) throw DomainError("tau values must be positive");
    if (i > 0 && !(taus[i] > taus[i - 1])) throw DomainError("tau grid must be strictly ascending");
  }
  TauScanResult scan;
  scan.taus = taus;
  scan.counts.assign(taus.size(), 0);
  scan.iterations.assign(taus.size(), 0);
  scan.converged.assign(taus.size(), false);

  GammaSupConfig cfg = base;
  cfg.params.s = s;
  cfg.record_trajectory = false;
  cfg.params.tau = taus.front();
  cfg.validate();

  // Jobs are independent; each one runs its sweeps single-threaded.
  const int workers = base.threads > 0 ? base.threads : omp_get_max_threads();
  std::vector<char> done(taus.size(), 0);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::size_t i = 0; i < taus.size(); ++i) {
    GammaSupConfig job = cfg;
    job.params.tau = taus[i];
    job.threads = 1;
    const ClusterResult r = gamma_sup(data, job);
    scan.counts[i] = r.num_clusters();
    scan.iterations[i] = r.iterations;
    done[i] = r.converged ? 1 : 0;
  }
  for (std::size_t i = 0; i < taus.size(); ++i) scan.converged[i] = done[i] != 0;
  detect_phases(scan, static_cast<std::size_t>(data.rows()));
  return scan;
}

}  // namespace gsup
