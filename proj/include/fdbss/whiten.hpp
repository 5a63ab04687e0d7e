#pragma once

#include <Eigen/Dense>

namespace fdbss {

/// Default Tikhonov factor m in c = m * trace(R).
inline constexpr double kDefaultRegularization = 1e-3;

struct WhiteningBundle {
  Eigen::MatrixXcd V;         // eigenvectors of R + cI, columns
  Eigen::VectorXd lambda;     // eigenvalues, descending, all > 0
  double c = 0.0;             // regularization constant actually added
  Eigen::MatrixXcd whitener;  // Lambda^{-1/2} V^H
  Eigen::MatrixXcd Z;         // whitener * X
};

/// R = (1/Q) X X^H, symmetrized.
Eigen::MatrixXcd covariance(const Eigen::MatrixXcd& X);

struct Regularized {
  Eigen::MatrixXcd R;
  double c = 0.0;
};

/// R + c I with c = m * trace(R). Throws InvalidArgument for m < 0.
Regularized regularize(const Eigen::MatrixXcd& R, double m);

/// Whitens one bin's observations (channels x frames). Each eigenvector is
/// rotated so its largest-magnitude entry is real and positive. Throws
/// NumericalRankError when the regularized covariance is not positive
/// definite.
WhiteningBundle whiten_bin(const Eigen::MatrixXcd& X, double m);

}  // namespace fdbss
