#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fdbss/window.hpp"

namespace fdbss {

/// perm[n] is the per-bin output row that carries global source n.
using Permutation = std::vector<int>;

enum class ProfileKind { envelope, log_power, dominance };
enum class Measure { distance, correlation };
enum class Procedure { iterative, kmeans };

/// The six profile x measure x procedure combinations.
enum class PermMethod { method1 = 1, method2, method3, method4, method5, method6 };

struct MethodTriple {
  ProfileKind profile;
  Measure measure;
  Procedure procedure;
};

MethodTriple describe(PermMethod method);
std::string to_string(PermMethod method);
PermMethod perm_method_from_string(const std::string& name);
std::string to_string(ProfileKind kind);

inline constexpr int kMaxExhaustiveSources = 8;
inline constexpr double kLogPowerFloor = 1e-12;

/// Per-bin profiles, N x T_f.
struct ProfileMatrix {
  Eigen::MatrixXd values;
  ProfileKind kind = ProfileKind::dominance;
};

/// Frequency-independent reference profiles, N x T_f.
struct CentroidMatrix {
  Eigen::MatrixXd M;
};

/// Builds one profile matrix per bin from separated spectra (N x Q per bin).
/// envelope |y|, log_power log(|y|^2 + eps) centered per row, dominance
/// |y_n|^2 / sum_k |y_k|^2 (1/N on silent frames). With `frames` < Q the
/// frame axis is resampled into that many 50%-overlapping segments.
std::vector<ProfileMatrix> build_profiles(const std::vector<Eigen::MatrixXcd>& Y, ProfileKind kind,
                                          std::optional<Eigen::Index> frames = std::nullopt);

/// k-means (k = N) over the stacked F*N x T_f profile rows.
CentroidMatrix cluster_centroids(const Eigen::MatrixXd& stacked, int n, std::uint64_t seed);

/// Stacks the per-bin profile matrices into F*N x T_f.
Eigen::MatrixXd stack_profiles(const std::vector<ProfileMatrix>& profiles);

/// Criterion value of matching F_w rows to centroid rows under `perm`:
/// summed squared distance, or summed Pearson correlation.
double permutation_criterion(const Eigen::MatrixXd& F, const Eigen::MatrixXd& M, const Permutation& perm,
                             Measure measure);

/// Pearson correlation of two rows; zero if either is constant.
double pearson(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);

struct BinPermutation {
  Permutation perm;
  double criterion = 0.0;
};

/// Exhaustive search over all N! permutations; minimum distance or maximum
/// correlation. Ties keep the lexicographically first permutation. Throws
/// SizeLimit for N > 8.
BinPermutation permute_bin(const Eigen::MatrixXd& F, const CentroidMatrix& M, Measure measure);

struct AlignOptions {
  std::optional<Eigen::Index> profile_frames;  // T_f, all frames when unset
  std::uint64_t seed = 0;
  int max_rounds = 50;
};

struct Alignment {
  std::vector<Permutation> gamma;
  CentroidMatrix centroids;
  int rounds = 0;
  /// Summed per-bin criterion at the final permutations.
  double criterion = 0.0;
};

/// Solves the per-bin permutations for one of the six methods. Labels are
/// canonicalized so that the first bin keeps the identity permutation.
Alignment align_all(const std::vector<Eigen::MatrixXcd>& Y, PermMethod method, const AlignOptions& opts = {});

/// Per-bin scaling and permutation resolved for a full set of bins.
struct DemixingSet {
  std::vector<Eigen::MatrixXcd> U;
  std::vector<Eigen::VectorXcd> D;
  std::vector<Permutation> gamma;
  WindowSpec window;
};

/// Output row n at bin w is D[w][perm[n]] * Y[w].row(perm[n]). Empty D means
/// unit scaling.
std::vector<Eigen::MatrixXcd> apply_alignment(const std::vector<Eigen::MatrixXcd>& Y, const DemixingSet& set);

Permutation invert(const Permutation& perm);
Permutation compose(const Permutation& outer, const Permutation& inner);
bool is_bijection(const Permutation& perm);

}  // namespace fdbss
