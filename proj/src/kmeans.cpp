#include "fdbss/kmeans.hpp"

#include <cmath>
#include <limits>

#include "fdbss/error.hpp"
#include "fdbss/rng.hpp"

namespace fdbss {

using Eigen::Index;

namespace {

Eigen::MatrixXd plus_plus_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd dist = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist.sum();
    Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= dist[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
    dist = dist.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& opts) {
  const Index n = points.rows();
  if (k < 1) throw InvalidArgument("k must be positive");
  if (n < k) throw InvalidArgument("fewer points than clusters");

  Rng rng(seed);
  KMeansResult res;
  res.centroids = plus_plus_init(points, k, rng);
  res.labels.assign(static_cast<std::size_t>(n), 0);

  double previous = std::numeric_limits<double>::infinity();
  Eigen::VectorXd point_dist(n);
  for (int it = 1; it <= opts.max_iter; ++it) {
    res.iterations = it;
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - res.centroids.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      res.labels[static_cast<std::size_t>(i)] = arg;
      point_dist[i] = best;
      inertia += best;
    }
    res.inertia = inertia;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      const int c = res.labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        res.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        Index far = 0;
        point_dist.maxCoeff(&far);
        res.centroids.row(c) = points.row(far);
        point_dist[far] = 0.0;
      }
    }

    if (std::isfinite(previous) && std::abs(previous - inertia) <= opts.rel_tol * std::max(previous, 1e-300)) break;
    previous = inertia;
  }
  return res;
}

}  // namespace fdbss
