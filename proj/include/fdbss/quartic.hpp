#pragma once

#include <array>
#include <complex>
#include <vector>

namespace fdbss {

/// Polynomial a_0 + a_1 mu + ... + a_4 mu^4 with real coefficients.
struct Quartic {
  std::array<double, 5> a{};

  double operator()(double mu) const;
  std::complex<double> operator()(std::complex<double> mu) const;
  double max_abs_coefficient() const;
};

/// All complex roots (with multiplicity) of the quartic, by Ferrari's
/// method. Leading coefficients below 1e-13 of the largest are treated as
/// zero and the cubic, quadratic or linear closed form is used instead. Each
/// root is Newton-polished; if any residual still exceeds
/// 1e-8 * max|a_n| * max(1, |r|)^4 the companion-matrix eigenvalues are
/// returned instead. A nonzero constant has no roots. Throws
/// DegeneratePolynomial for the zero polynomial.
std::vector<std::complex<double>> solve_quartic(const Quartic& p);

/// Roots of a x^2 + b x + c (a != 0), cancellation-free.
std::array<std::complex<double>, 2> solve_quadratic(std::complex<double> a, std::complex<double> b,
                                                    std::complex<double> c);

/// Roots of x^3 + a x^2 + b x + c by Cardano's formula.
std::array<std::complex<double>, 3> solve_monic_cubic(std::complex<double> a, std::complex<double> b,
                                                      std::complex<double> c);

/// |p(r)| / (max|a_n| * max(1, |r|)^4).
double relative_residual(const Quartic& p, std::complex<double> r);

}  // namespace fdbss
