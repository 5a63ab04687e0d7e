#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fdbss {

inline constexpr double kMetricCapDb = 100.0;
inline constexpr Eigen::Index kDefaultEvalFilterLength = 1024;

/// estimate = s_target + e_interf + e_artif.
struct DecompositionResult {
  Eigen::VectorXd s_target;
  Eigen::VectorXd e_interf;
  Eigen::VectorXd e_artif;
  Eigen::Index filter_len = 0;
  Eigen::Index reference = 0;  // matched reference row
};

/// Least-squares projections onto spans of delayed reference copies
/// s_j(k - d), d = 0..L-1, truncated to the signal length. The Gram
/// matrices are built exactly and factored once, so one projector serves
/// any number of estimates.
class DelayProjector {
 public:
  /// references: N x K rows. Requires L <= K / 4 and no all-zero reference.
  DelayProjector(const Eigen::MatrixXd& references, Eigen::Index filter_len);

  Eigen::Index sources() const { return refs_.rows(); }
  Eigen::Index length() const { return refs_.cols(); }
  Eigen::Index filter_len() const { return L_; }

  /// ||projection of e onto reference j's delays||^2, without synthesis.
  double target_energy(const Eigen::VectorXd& estimate, Eigen::Index j) const;

  DecompositionResult decompose(const Eigen::VectorXd& estimate, Eigen::Index j) const;

 private:
  Eigen::VectorXd correlations(const Eigen::VectorXd& estimate) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs, Eigen::Index first_ref, Eigen::Index refs) const;

  Eigen::MatrixXd refs_;
  Eigen::Index L_;
  Eigen::Index nfft_;
  std::vector<Eigen::VectorXcd> ref_spectra_;
  Eigen::LLT<Eigen::MatrixXd> all_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> single_;
};

/// Decomposes one estimate against the reference with the largest
/// projection energy.
DecompositionResult bss_decompose(const Eigen::VectorXd& estimate, const Eigen::MatrixXd& references,
                                  Eigen::Index filter_len);

/// 10 log10(|s_target|^2 / |e_interf|^2), capped at +100 dB.
double sir_db(const DecompositionResult& d);
/// 10 log10(|s_target|^2 / |e_interf + e_artif|^2), capped at +100 dB.
double sdr_db(const DecompositionResult& d);

struct SeparationScores {
  std::vector<double> sir_db;
  std::vector<double> sdr_db;
  std::vector<Eigen::Index> matched_reference;  // per estimate
};

/// Scores each estimate row against the reference rows. Matching is greedy by
/// projection energy and bijective when estimates and references are equal
/// in number.
SeparationScores evaluate_separation(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& references,
                                     Eigen::Index filter_len = kDefaultEvalFilterLength);

/// Normalized Amari error in [0, 1]; 0 exactly for a scaled permutation.
double amari_index(const Eigen::MatrixXcd& P);

}  // namespace fdbss
