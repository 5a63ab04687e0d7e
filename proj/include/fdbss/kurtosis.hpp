#pragma once

#include <Eigen/Dense>
#include <array>

#include "fdbss/quartic.hpp"

namespace fdbss {

/// Normalized fourth-order cumulant of a complex sequence:
///   (E|y|^4 - 2 (E|y|^2)^2 - |E y^2|^2) / (E|y|^2)^2.
/// Throws UndefinedContrast for a zero-energy input.
double kurtosis(const Eigen::VectorXcd& y);

/// Extractor output y = u^H z as a column vector of length Q.
Eigen::VectorXcd extract_output(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u);

/// Gradient of kurtosis(u^H z) with respect to u in real coordinates:
/// entry i is dK/dRe(u_i) + j dK/dIm(u_i), i.e. twice the Wirtinger
/// derivative dK/du_i*.
Eigen::VectorXcd kurtosis_gradient(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u);

/// Contrast of y + mu gy written as numerator(mu) / power(mu)^2, where
/// numerator has degree 4 and power = E|y + mu gy|^2 has degree 2.
struct LineContrast {
  std::array<double, 5> numerator{};
  std::array<double, 3> power{};
};

/// Recovers the numerator and power polynomials by exact interpolation from
/// direct moment evaluations at 5 (resp. 3) step values.
LineContrast line_contrast(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy);

/// Coefficients of numerator' * power - 2 * numerator * power', degree 5.
/// The mu^5 coefficient cancels analytically.
std::array<double, 6> stationarity_polynomial(const LineContrast& lc);

/// kurtosis(y + mu gy) evaluated directly.
double contrast_along(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy, double mu);

/// Degree-4 polynomial whose real roots are the stationary points of
/// mu -> kurtosis(y + mu gy) with y = u^H z and gy = g^H z.
Quartic step_poly(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u, const Eigen::VectorXcd& g);
Quartic step_poly_from_outputs(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy);

}  // namespace fdbss
