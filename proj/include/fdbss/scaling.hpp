#pragma once

#include <Eigen/Dense>

namespace fdbss {

struct LsMixing {
  Eigen::MatrixXcd H;  // M x N
  /// Y Y^H was rank deficient and a truncated pseudo-inverse was used.
  bool rank_deficient = false;
};

/// Least-squares mixing estimate H = X Y^H (Y Y^H)^+ from observations X
/// (M x Q) and separated outputs Y (N x Q).
LsMixing ls_mixing(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y);

struct Rescaled {
  Eigen::VectorXcd D;           // diagonal of diag(A H_LS), A = (1/M) ones(N, M)
  Eigen::MatrixXcd Y;           // D-scaled outputs
  bool rank_deficient = false;
};

/// Minimal-distortion rescaling: each output becomes the average over sensors
/// of its own least-squares image.
Rescaled minimal_distortion_rescale(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y);

}  // namespace fdbss
