#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace adactrl {

// bins+1 geometric edges spanning [lo, hi]. Shared by the simulator's budget
// grid and the evaluation histograms so their reports line up.
inline std::vector<double> log_spaced_edges(double lo, double hi, int bins) {
  if (!(lo > 0.0) || !(hi > lo) || bins < 1) {
    throw std::invalid_argument("log_spaced_edges: need 0 < lo < hi and bins >= 1");
  }
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  const double ratio = hi / lo;
  for (int i = 0; i <= bins; ++i) {
    edges[static_cast<std::size_t>(i)] =
        lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(bins));
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

inline std::vector<double> geometric_centers(const std::vector<double>& edges) {
  std::vector<double> centers(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    centers[i] = std::sqrt(edges[i] * edges[i + 1]);
  }
  return centers;
}

}  // namespace adactrl
