#include "fdbss/scaling.hpp"

#include "fdbss/error.hpp"

namespace fdbss {

LsMixing ls_mixing(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y) {
  if (X.cols() != Y.cols()) throw InvalidArgument("observations and outputs differ in frame count");
  if (Y.rows() < 1) throw InvalidArgument("no separated outputs");

  // H^H is the minimum-norm least-squares solution of Y^H B = X^H.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(Y.adjoint());
  cod.setThreshold(1e-12);
  LsMixing out;
  out.H = cod.solve(X.adjoint()).adjoint();
  out.rank_deficient = cod.rank() < Y.rows();
  return out;
}

Rescaled minimal_distortion_rescale(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& Y) {
  const LsMixing ls = ls_mixing(X, Y);
  // diag(A H) with A = (1/M) ones: column means of H.
  Rescaled out;
  out.D = ls.H.colwise().mean().transpose();
  out.Y = out.D.asDiagonal() * Y;
  out.rank_deficient = ls.rank_deficient;
  return out;
}

}  // namespace fdbss
