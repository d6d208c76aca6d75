#include "graphtest/distances.hpp"

#include <cmath>
#include <string>

namespace graphtest {

DistanceMatrix euclidean_distances(const VectorDataset& data) {
  if (data.rows < 1) fail(errc::too_few_nodes, "need at least 1 observation");
  if (data.cols < 1) fail(errc::dimension_mismatch, "observations need at least 1 coordinate");
  for (double v : data.values) {
    if (!std::isfinite(v)) fail(errc::non_finite_input, "non-finite coordinate in data");
  }
  const int n = data.rows;
  DistanceMatrix d{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < data.cols; ++c) {
        double diff = data.at(i, c) - data.at(j, c);
        s += diff * diff;
      }
      double v = std::sqrt(s);
      d.at(i, j) = v;
      d.at(j, i) = v;
    }
  }
  return d;
}

namespace {

// Frobenius norm of a 0/1 adjacency matrix is sqrt of the entry count.
double frobenius(const NetworkDataset& nets, int obs) {
  long long s = 0;
  for (int i = 0; i < nets.size; ++i) {
    for (int j = 0; j < nets.size; ++j) s += nets.at(obs, i, j);
  }
  return std::sqrt(static_cast<double>(s));
}

long long hamming(const NetworkDataset& nets, int a, int b) {
  long long s = 0;
  for (int i = 0; i < nets.size; ++i) {
    for (int j = 0; j < nets.size; ++j) {
      s += nets.at(a, i, j) != nets.at(b, i, j) ? 1 : 0;
    }
  }
  return s;
}

void check_networks(const NetworkDataset& nets) {
  if (nets.count < 1) fail(errc::too_few_nodes, "need at least 1 network");
  if (nets.size < 1) fail(errc::dimension_mismatch, "networks need at least 1 vertex");
  std::size_t want = static_cast<std::size_t>(nets.count) * nets.size * nets.size;
  if (nets.values.size() != want) {
    fail(errc::shape_mismatch, "network data holds " + std::to_string(nets.values.size()) +
                                   " entries, expected " + std::to_string(want));
  }
}

}  // namespace

DistanceMatrix network_distance_d1(const NetworkDataset& nets) {
  check_networks(nets);
  const int n = nets.count;
  DistanceMatrix d{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double v = static_cast<double>(hamming(nets, a, b));
      d.at(a, b) = v;
      d.at(b, a) = v;
    }
  }
  return d;
}

DistanceMatrix network_distance_d2(const NetworkDataset& nets) {
  check_networks(nets);
  const int n = nets.count;
  std::vector<double> norms(n);
  for (int a = 0; a < n; ++a) {
    norms[a] = frobenius(nets, a);
    if (norms[a] == 0.0) {
      fail(errc::zero_network, "network " + std::to_string(a) +
                                   " has no links; the normalized distance is undefined");
    }
  }
  DistanceMatrix d{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      double v = static_cast<double>(hamming(nets, a, b)) / (norms[a] * norms[b]);
      d.at(a, b) = v;
      d.at(b, a) = v;
    }
  }
  return d;
}

}  // namespace graphtest
