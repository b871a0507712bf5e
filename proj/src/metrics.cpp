#include "gsup/metrics.hpp"

#include <algorithm>
#include <set>

#include "gsup/error.hpp"

namespace gsup {

namespace {

void check_pair(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw DimensionError("truth and predicted label counts differ");
  if (truth.empty()) throw DimensionError("label sets are empty");
}

// sum over `outer` ids of the largest joint count with any `inner` id.
std::size_t best_overlap_sum(const Contingency& table, bool outer_is_predicted) {
  std::map<int, std::size_t> best;
  for (const auto& [key, count] : table) {
    const int outer = outer_is_predicted ? key.second : key.first;
    auto& b = best[outer];
    b = std::max(b, count);
  }
  std::size_t total = 0;
  for (const auto& [id, b] : best) total += b;
  return total;
}

}  // namespace

Contingency contingency(std::span<const int> truth, std::span<const int> predicted) {
  check_pair(truth, predicted);
  Contingency table;
  for (std::size_t i = 0; i < truth.size(); ++i) ++table[{truth[i], predicted[i]}];
  return table;
}

std::size_t purity_number(std::span<const int> truth, std::span<const int> predicted) {
  return best_overlap_sum(contingency(truth, predicted), true);
}

std::size_t impurity(std::span<const int> truth, std::span<const int> predicted) {
  return truth.size() - purity_number(truth, predicted);
}

std::size_t c_impurity(std::span<const int> truth, std::span<const int> predicted) {
  return truth.size() - best_overlap_sum(contingency(truth, predicted), false);
}

std::size_t distinct_count(std::span<const int> ids) {
  return std::set<int>(ids.begin(), ids.end()).size();
}

}  // namespace gsup
