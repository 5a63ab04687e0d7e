#include "fdbss/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fdbss/error.hpp"
#include "fdbss/kmeans.hpp"

namespace fdbss {

using Eigen::Index;

MethodTriple describe(PermMethod method) {
  switch (method) {
    case PermMethod::method1:
      return {ProfileKind::envelope, Measure::distance, Procedure::iterative};
    case PermMethod::method2:
      return {ProfileKind::log_power, Measure::correlation, Procedure::iterative};
    case PermMethod::method3:
      return {ProfileKind::envelope, Measure::distance, Procedure::kmeans};
    case PermMethod::method4:
      return {ProfileKind::log_power, Measure::correlation, Procedure::kmeans};
    case PermMethod::method5:
      return {ProfileKind::dominance, Measure::correlation, Procedure::iterative};
    case PermMethod::method6:
      return {ProfileKind::dominance, Measure::correlation, Procedure::kmeans};
  }
  throw InvalidArgument("unknown permutation method");
}

std::string to_string(PermMethod method) { return "method" + std::to_string(static_cast<int>(method)); }

PermMethod perm_method_from_string(const std::string& name) {
  for (int k = 1; k <= 6; ++k)
    if (name == "method" + std::to_string(k) || name == std::to_string(k)) return static_cast<PermMethod>(k);
  throw InvalidArgument("unknown permutation method '" + name + "' (expected method1..method6)");
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::envelope:
      return "envelope";
    case ProfileKind::log_power:
      return "log_power";
    case ProfileKind::dominance:
      return "dominance";
  }
  return "unknown";
}

namespace {

// Per-frame source powers |y|^2 (or magnitudes), aggregated over segments
// when fewer profile frames than STFT frames are requested.
Eigen::MatrixXd segment_mean(const Eigen::MatrixXd& per_frame, Index frames) {
  const Index Q = per_frame.cols();
  if (frames == Q) return per_frame;
  const Index width = std::max<Index>(1, (2 * Q + frames) / (frames + 1));
  const double hop = frames > 1 ? static_cast<double>(Q - width) / static_cast<double>(frames - 1) : 0.0;
  Eigen::MatrixXd out(per_frame.rows(), frames);
  for (Index t = 0; t < frames; ++t) {
    const Index start = std::min(Q - width, static_cast<Index>(std::lround(hop * static_cast<double>(t))));
    out.col(t) = per_frame.middleCols(start, width).rowwise().mean();
  }
  return out;
}

}  // namespace

std::vector<ProfileMatrix> build_profiles(const std::vector<Eigen::MatrixXcd>& Y, ProfileKind kind,
                                          std::optional<Index> frames) {
  std::vector<ProfileMatrix> out;
  out.reserve(Y.size());
  for (const auto& y : Y) {
    const Index n = y.rows();
    const Index Q = y.cols();
    const Index tf = frames.value_or(Q);
    if (tf < 1 || tf > Q) throw InvalidArgument("profile frame count must lie in [1, Q]");

    ProfileMatrix p;
    p.kind = kind;
    switch (kind) {
      case ProfileKind::envelope:
        p.values = segment_mean(y.cwiseAbs(), tf);
        break;
      case ProfileKind::log_power: {
        p.values = (segment_mean(y.cwiseAbs2(), tf).array() + kLogPowerFloor).log().matrix();
        p.values.colwise() -= p.values.rowwise().mean();
        break;
      }
      case ProfileKind::dominance: {
        p.values = segment_mean(y.cwiseAbs2(), tf);
        for (Index t = 0; t < tf; ++t) {
          const double total = p.values.col(t).sum();
          if (total > 0.0)
            p.values.col(t) /= total;
          else
            p.values.col(t).setConstant(1.0 / static_cast<double>(n));
        }
        break;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

Eigen::MatrixXd stack_profiles(const std::vector<ProfileMatrix>& profiles) {
  if (profiles.empty()) throw InvalidArgument("no profiles to stack");
  const Index n = profiles.front().values.rows();
  const Index tf = profiles.front().values.cols();
  Eigen::MatrixXd g(n * static_cast<Index>(profiles.size()), tf);
  for (std::size_t w = 0; w < profiles.size(); ++w) {
    if (profiles[w].values.rows() != n || profiles[w].values.cols() != tf)
      throw InvalidArgument("profile matrices differ in shape");
    g.middleRows(static_cast<Index>(w) * n, n) = profiles[w].values;
  }
  return g;
}

CentroidMatrix cluster_centroids(const Eigen::MatrixXd& stacked, int n, std::uint64_t seed) {
  if (stacked.rows() < n) throw InvalidArgument("fewer profile rows than clusters");
  return {kmeans(stacked, n, seed).centroids};
}

double pearson(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const Eigen::RowVectorXd ca = a.array() - a.mean();
  const Eigen::RowVectorXd cb = b.array() - b.mean();
  const double den = ca.norm() * cb.norm();
  if (!(den > 0.0)) return 0.0;
  return ca.dot(cb) / den;
}

namespace {

Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& F, const Eigen::MatrixXd& M, Measure measure) {
  const Index n = M.rows();
  Eigen::MatrixXd cost(n, n);  // cost(label, row)
  for (Index m = 0; m < n; ++m)
    for (Index r = 0; r < n; ++r)
      cost(m, r) = measure == Measure::distance ? (M.row(m) - F.row(r)).squaredNorm() : pearson(M.row(m), F.row(r));
  return cost;
}

}  // namespace

double permutation_criterion(const Eigen::MatrixXd& F, const Eigen::MatrixXd& M, const Permutation& perm,
                             Measure measure) {
  double total = 0.0;
  for (Index m = 0; m < M.rows(); ++m) {
    const Index r = perm[static_cast<std::size_t>(m)];
    total += measure == Measure::distance ? (M.row(m) - F.row(r)).squaredNorm() : pearson(M.row(m), F.row(r));
  }
  return total;
}

BinPermutation permute_bin(const Eigen::MatrixXd& F, const CentroidMatrix& centroids, Measure measure) {
  const Eigen::MatrixXd& M = centroids.M;
  const Index n = M.rows();
  if (n > kMaxExhaustiveSources)
    throw SizeLimit("exhaustive permutation search is limited to " + std::to_string(kMaxExhaustiveSources) +
                    " sources");
  if (F.rows() != n || F.cols() != M.cols()) throw InvalidArgument("profile and centroid shapes differ");

  const Eigen::MatrixXd cost = cost_matrix(F, M, measure);
  Permutation perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  BinPermutation best{perm, 0.0};
  bool first = true;
  do {
    double value = 0.0;
    for (Index m = 0; m < n; ++m) value += cost(m, perm[static_cast<std::size_t>(m)]);
    const bool better = measure == Measure::distance ? value < best.criterion : value > best.criterion;
    if (first || better) {
      best = {perm, value};
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Alignment align_all(const std::vector<Eigen::MatrixXcd>& Y, PermMethod method, const AlignOptions& opts) {
  if (Y.empty()) throw InvalidArgument("no bins to align");
  const MethodTriple triple = describe(method);
  const int n = static_cast<int>(Y.front().rows());
  const std::vector<ProfileMatrix> profiles = build_profiles(Y, triple.profile, opts.profile_frames);
  const std::size_t F = profiles.size();

  Alignment out;
  out.centroids = cluster_centroids(stack_profiles(profiles), n, opts.seed);
  out.gamma.resize(F);
  for (std::size_t w = 0; w < F; ++w) out.gamma[w] = permute_bin(profiles[w].values, out.centroids, triple.measure).perm;
  out.rounds = 1;

  if (triple.procedure == Procedure::iterative) {
    for (int round = 2; round <= opts.max_rounds; ++round) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, out.centroids.M.cols());
      for (std::size_t w = 0; w < F; ++w)
        for (int m = 0; m < n; ++m) M.row(m) += profiles[w].values.row(out.gamma[w][static_cast<std::size_t>(m)]);
      out.centroids.M = M / static_cast<double>(F);

      bool changed = false;
      for (std::size_t w = 0; w < F; ++w) {
        Permutation p = permute_bin(profiles[w].values, out.centroids, triple.measure).perm;
        if (p != out.gamma[w]) {
          out.gamma[w] = std::move(p);
          changed = true;
        }
      }
      out.rounds = round;
      if (!changed) break;
    }
  }

  // Relabel so the first bin keeps its own order.
  const Permutation sigma = invert(out.gamma.front());
  for (auto& p : out.gamma) p = compose(p, sigma);
  Eigen::MatrixXd relabeled(out.centroids.M.rows(), out.centroids.M.cols());
  for (int m = 0; m < n; ++m) relabeled.row(m) = out.centroids.M.row(sigma[static_cast<std::size_t>(m)]);
  out.centroids.M = relabeled;

  out.criterion = 0.0;
  for (std::size_t w = 0; w < F; ++w)
    out.criterion += permutation_criterion(profiles[w].values, out.centroids.M, out.gamma[w], triple.measure);
  return out;
}

std::vector<Eigen::MatrixXcd> apply_alignment(const std::vector<Eigen::MatrixXcd>& Y, const DemixingSet& set) {
  if (set.gamma.size() != Y.size()) throw InvalidArgument("permutation count does not match bin count");
  if (!set.D.empty() && set.D.size() != Y.size()) throw InvalidArgument("scaling count does not match bin count");
  std::vector<Eigen::MatrixXcd> out(Y.size());
  for (std::size_t w = 0; w < Y.size(); ++w) {
    const Permutation& p = set.gamma[w];
    out[w].resize(Y[w].rows(), Y[w].cols());
    for (Index m = 0; m < Y[w].rows(); ++m) {
      const Index r = p[static_cast<std::size_t>(m)];
      out[w].row(m) = Y[w].row(r);
      if (!set.D.empty()) out[w].row(m) *= set.D[w][r];
    }
  }
  return out;
}

Permutation invert(const Permutation& perm) {
  Permutation inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  return inv;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  Permutation out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer[static_cast<std::size_t>(inner[i])];
  return out;
}

bool is_bijection(const Permutation& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int v : perm) {
    if (v < 0 || static_cast<std::size_t>(v) >= perm.size() || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

}  // namespace fdbss
