#pragma once

#include <cstdint>
#include <vector>

#include "graphtest/builders.hpp"

namespace graphtest {

// N observations by d real features, row-major.
struct VectorDataset {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
};

// N directed binary adjacency matrices over the same s subjects, zero
// diagonal, stored row-major per observation.
struct NetworkDataset {
  int count = 0;
  int size = 0;
  std::vector<std::uint8_t> values;

  std::uint8_t at(int obs, int i, int j) const {
    return values[(static_cast<std::size_t>(obs) * size + i) * size + j];
  }
};

// Pairwise Euclidean distances; rejects non-finite entries.
DistanceMatrix euclidean_distances(const VectorDataset& data);

// Squared Frobenius norm of the adjacency difference = number of entries
// on which the two networks disagree.
DistanceMatrix network_distance_d1(const NetworkDataset& nets);

// d1 normalized by the geometric mean of the edge totals:
// d2(A,B) = ||A-B||_F^2 / (||A||_F ||B||_F). Every network must have at
// least one edge (callers filter empty observations first).
DistanceMatrix network_distance_d2(const NetworkDataset& nets);

}  // namespace graphtest
