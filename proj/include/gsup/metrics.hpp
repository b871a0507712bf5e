#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>

namespace gsup {

/// Joint counts |c_i ∩ ω_j| keyed by (truth id, predicted id). Ids are opaque.
using Contingency = std::map<std::pair<int, int>, std::size_t>;

Contingency contingency(std::span<const int> truth, std::span<const int> predicted);

/// sum over output clusters of the largest overlap with a true class (not normalized).
std::size_t purity_number(std::span<const int> truth, std::span<const int> predicted);

/// n - purity: zero iff every output cluster is class-pure.
std::size_t impurity(std::span<const int> truth, std::span<const int> predicted);

/// n - sum over true classes of the largest overlap with an output cluster;
/// penalizes a class split across several output clusters.
std::size_t c_impurity(std::span<const int> truth, std::span<const int> predicted);

std::size_t distinct_count(std::span<const int> ids);

}  // namespace gsup
