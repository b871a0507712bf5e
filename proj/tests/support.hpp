#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "gsup/rng.hpp"
#include "gsup/types.hpp"

namespace gsup::test {

/// n x p standard normal draws scaled by sd and shifted by offset.
inline DataMatrix normal_cloud(int n, int p, std::uint64_t seed, double sd = 1.0, double offset = 0.0) {
  CounterRng rng(seed, 77);
  DataMatrix m(n, p);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < p; ++c) m(i, c) = offset + sd * rng.normal();
  }
  return m;
}

/// Stacks blocks vertically.
inline DataMatrix stack(const std::vector<DataMatrix>& parts) {
  Eigen::Index rows = 0;
  for (const auto& m : parts) rows += m.rows();
  DataMatrix out(rows, parts.front().cols());
  Eigen::Index at = 0;
  for (const auto& m : parts) {
    out.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return out;
}

/// Sorts the rows of a center matrix lexicographically so center sets can be compared.
inline DataMatrix sorted_rows(const DataMatrix& m) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(a, c) != m(b, c)) return m(a, c) < m(b, c);
    }
    return false;
  });
  DataMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < order.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(order[i]);
  return out;
}

}  // namespace gsup::test
