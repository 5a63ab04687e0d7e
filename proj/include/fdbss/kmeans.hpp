#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace fdbss {

struct KMeansOptions {
  int max_iter = 300;
  double rel_tol = 1e-6;  // stop when relative inertia change drops below
};

struct KMeansResult {
  Eigen::MatrixXd centroids;  // k x dims
  std::vector<int> labels;    // one per data row
  double inertia = 0.0;
  int iterations = 0;
};

/// Lloyd's algorithm with seeded k-means++ initialization on the rows of
/// `points`. An empty cluster is re-seeded from the point farthest from its
/// current centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& opts = {});

}  // namespace fdbss
