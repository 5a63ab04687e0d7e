#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "fdbss/kurtosis.hpp"
#include "fdbss/quartic.hpp"

namespace fdbss {

struct IcaOptions {
  int max_iter = 100;
  double conv_tol = 1e-6;
  /// When set, each component starts from a seeded random unit vector
  /// instead of the canonical basis vector e_n.
  std::optional<std::uint64_t> random_init_seed;
};

struct ExtractionState {
  Eigen::VectorXcd u;
  int iteration = 0;
  double mu_opt = 0.0;
  bool converged = false;
  /// Line search produced no usable step; u was left at the last iterate.
  bool stalled = false;
};

struct Extraction {
  Eigen::VectorXcd u;
  Eigen::VectorXcd y;
  ExtractionState state;
};

/// Picks the step maximizing |kurtosis(y + mu gy)| among the real roots.
/// Real parts of complex roots are used only when no root is real. Throws
/// NoStep when no candidate yields a defined contrast.
double select_step(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u, const Eigen::VectorXcd& g,
                   const std::vector<std::complex<double>>& roots);
double select_step_from_outputs(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy,
                                const std::vector<std::complex<double>>& roots);

/// Projects u onto the orthogonal complement of `prior` (applied twice for
/// accuracy). Does not normalize.
Eigen::VectorXcd orthogonalize(const Eigen::VectorXcd& u, const std::vector<Eigen::VectorXcd>& prior);

/// One deflation stage: gradient step with algebraically optimal step size,
/// Gram-Schmidt against `prior`, normalization; until |<u_new, u_old>| >=
/// 1 - conv_tol or max_iter. When `prior` leaves a single direction it is
/// returned at once; a zero-energy output ends the search as a stall.
Extraction extract_component(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u0,
                             const std::vector<Eigen::VectorXcd>& prior, const IcaOptions& opts = {});

/// z - h y with h = z y^H / (y y^H), the least-squares regression residual.
Eigen::MatrixXcd deflate_subtract(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& y);

struct BinDemixing {
  /// Columns u_n; the separated outputs are U^H z.
  Eigen::MatrixXcd U;
  std::vector<ExtractionState> states;
  /// An extraction stalled and the remaining columns came from the
  /// orthogonal complement.
  bool partial = false;
};

/// Extracts all N components of whitened data z (N x Q).
BinDemixing demix_bin(const Eigen::MatrixXcd& z, const IcaOptions& opts = {});

}  // namespace fdbss
