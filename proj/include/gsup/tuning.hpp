#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gsup/gammasup.hpp"
#include "gsup/types.hpp"

namespace gsup {

/// A maximal run of consecutive grid points with the same cluster count.
struct Plateau {
  std::size_t first = 0;  // grid index of the left end
  std::size_t last = 0;   // grid index of the right end (inclusive)
  std::size_t k = 0;

  std::size_t length() const { return last - first + 1; }
};

struct TauScanResult {
  std::vector<double> taus;
  std::vector<std::size_t> counts;
  std::vector<int> iterations;
  std::vector<bool> converged;
  /// First tau whose cluster count drops below n.
  std::optional<double> transition_tau;
  /// Longest plateau after the transition (ties: leftmost), excluding K = n and K = 1.
  std::optional<Plateau> plateau;
  /// Left end of the plateau.
  std::optional<double> recommended_tau;
};

inline constexpr std::size_t kMinPlateauLength = 3;

/// Runs gamma-SUP at every tau (ascending, positive) with the given s. The
/// remaining fields of `base` (tolerances, threads, ...) apply to every run.
TauScanResult scan_tau(const DataMatrix& data, double s, const std::vector<double>& taus,
                       const GammaSupConfig& base = {});

/// Plateau and transition detection on an already computed K(tau) table.
void detect_phases(TauScanResult& scan, std::size_t n);

/// `points` log-spaced values from 0.1 * (mean nearest-neighbour distance) to
/// 2 * (data diameter).
std::vector<double> default_tau_grid(const DataMatrix& data, int points = 40, int threads = 0);

std::vector<double> log_grid(double lo, double hi, int points);

}  // namespace gsup
