#include "fdbss/whiten.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "fdbss/error.hpp"

namespace fdbss {

using Eigen::Index;

Eigen::MatrixXcd covariance(const Eigen::MatrixXcd& X) {
  if (X.cols() < 1) throw InvalidArgument("covariance needs at least one frame");
  Eigen::MatrixXcd R = (X * X.adjoint()) / static_cast<double>(X.cols());
  return 0.5 * (R + R.adjoint());
}

Regularized regularize(const Eigen::MatrixXcd& R, double m) {
  if (!(m >= 0.0)) throw InvalidArgument("regularization factor must be non-negative");
  const double c = m * R.trace().real();
  Regularized out{R, c};
  out.R.diagonal().array() += c;
  return out;
}

WhiteningBundle whiten_bin(const Eigen::MatrixXcd& X, double m) {
  const Index n = X.rows();
  if (n < 1) throw InvalidArgument("no channels to whiten");
  if (X.cols() < n) throw InvalidArgument("fewer frames than channels");

  const Regularized reg = regularize(covariance(X), m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(reg.R);
  if (eig.info() != Eigen::Success) throw NumericalRankError("eigendecomposition failed");

  WhiteningBundle out;
  out.c = reg.c;
  out.lambda = eig.eigenvalues().reverse();
  out.V = eig.eigenvectors().rowwise().reverse();

  const double top = out.lambda[0];
  const double floor = std::max(top, 0.0) * 1e-12;
  if (!(top > 0.0) || !(out.lambda[n - 1] > floor))
    throw NumericalRankError("regularized covariance has non-positive eigenvalue " +
                             std::to_string(out.lambda[n - 1]) + "; increase the regularization factor");

  for (Index k = 0; k < n; ++k) {
    Index arg = 0;
    out.V.col(k).cwiseAbs().maxCoeff(&arg);
    const std::complex<double> pivot = out.V(arg, k);
    out.V.col(k) *= std::conj(pivot) / std::abs(pivot);
    out.V(arg, k) = std::abs(out.V(arg, k));
  }

  out.whitener = out.lambda.cwiseSqrt().cwiseInverse().asDiagonal() * out.V.adjoint();
  out.Z = out.whitener * X;
  return out;
}

}  // namespace fdbss
