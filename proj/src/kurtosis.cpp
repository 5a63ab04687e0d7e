#include "fdbss/kurtosis.hpp"

#include <cmath>
#include <complex>

#include "fdbss/error.hpp"

namespace fdbss {

using Eigen::Index;
using cd = std::complex<double>;

namespace {

struct Moments {
  double m2 = 0.0;
  double m4 = 0.0;
  cd c2 = 0.0;
};

Moments moments(const Eigen::VectorXcd& y) {
  Moments m;
  for (Index q = 0; q < y.size(); ++q) {
    const double p = std::norm(y[q]);
    m.m2 += p;
    m.m4 += p * p;
    m.c2 += y[q] * y[q];
  }
  const double inv = 1.0 / static_cast<double>(y.size());
  m.m2 *= inv;
  m.m4 *= inv;
  m.c2 *= inv;
  return m;
}

double numerator(const Moments& m) { return m.m4 - 2.0 * m.m2 * m.m2 - std::norm(m.c2); }

// Moments of y + mu * gy without materializing the sum.
Moments moments_along(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy, double mu) {
  Moments m;
  for (Index q = 0; q < y.size(); ++q) {
    const cd v = y[q] + mu * gy[q];
    const double p = std::norm(v);
    m.m2 += p;
    m.m4 += p * p;
    m.c2 += v * v;
  }
  const double inv = 1.0 / static_cast<double>(y.size());
  m.m2 *= inv;
  m.m4 *= inv;
  m.c2 *= inv;
  return m;
}

// Solves the Vandermonde system for coefficients of a polynomial sampled at
// integer nodes, then rescales from nu = mu / scale back to mu.
template <int Degree>
std::array<double, Degree + 1> interpolate(const std::array<double, Degree + 1>& values,
                                           const std::array<double, Degree + 1>& nodes, double scale) {
  constexpr int n = Degree + 1;
  Eigen::Matrix<double, n, n> vander;
  Eigen::Matrix<double, n, 1> rhs;
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
      vander(i, k) = p;
      p *= nodes[static_cast<std::size_t>(i)];
    }
    rhs[i] = values[static_cast<std::size_t>(i)];
  }
  const Eigen::Matrix<double, n, 1> b = vander.fullPivLu().solve(rhs);
  std::array<double, n> out{};
  double s = 1.0;
  for (int k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = b[k] / s;
    s *= scale;
  }
  return out;
}

}  // namespace

double kurtosis(const Eigen::VectorXcd& y) {
  if (y.size() == 0) throw UndefinedContrast("kurtosis of an empty sequence");
  const Moments m = moments(y);
  if (!(m.m2 > 0.0)) throw UndefinedContrast("kurtosis of a zero-energy sequence");
  return numerator(m) / (m.m2 * m.m2);
}

Eigen::VectorXcd extract_output(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u) {
  return (u.adjoint() * z).transpose();
}

Eigen::VectorXcd kurtosis_gradient(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u) {
  if (u.size() != z.rows()) throw InvalidArgument("extractor length does not match data rows");
  if (u.squaredNorm() == 0.0) throw InvalidArgument("extractor is zero");
  const Eigen::VectorXcd y = extract_output(z, u);
  const Moments m = moments(y);
  if (!(m.m2 > 0.0)) throw UndefinedContrast("gradient at a zero-energy output");

  // E[|y|^2 y* z], E[y* z], E[y z]
  const Index Q = z.cols();
  Eigen::VectorXcd w4(Q), w2(Q), wc(Q);
  for (Index q = 0; q < Q; ++q) {
    w4[q] = std::norm(y[q]) * std::conj(y[q]);
    w2[q] = std::conj(y[q]);
    wc[q] = y[q];
  }
  const double inv = 1.0 / static_cast<double>(Q);
  const Eigen::VectorXcd e4 = (z * w4) * inv;
  const Eigen::VectorXcd e2 = (z * w2) * inv;
  const Eigen::VectorXcd ec = (z * wc) * inv;

  const double num = numerator(m);
  const double m2sq = m.m2 * m.m2;
  // dK/du* = (2 e4 - 4 m2 e2 - 2 conj(c2) ec) / m2^2 - 2 num e2 / m2^3
  const Eigen::VectorXcd wirtinger =
      (2.0 * e4 - 4.0 * m.m2 * e2 - 2.0 * std::conj(m.c2) * ec) / m2sq - (2.0 * num / (m2sq * m.m2)) * e2;
  return 2.0 * wirtinger;
}

LineContrast line_contrast(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy) {
  if (y.size() != gy.size()) throw InvalidArgument("output and direction lengths differ");
  const double ey = y.squaredNorm();
  const double eg = gy.squaredNorm();
  if (!(eg > 0.0)) throw InvalidArgument("search direction produces a zero output");
  // Nodes at the natural scale of the problem keep the Vandermonde solve
  // well conditioned when |gy| and |y| differ by orders of magnitude.
  const double scale = ey > 0.0 ? std::sqrt(ey / eg) : 1.0;

  const std::array<double, 5> nodes5{-2.0, -1.0, 0.0, 1.0, 2.0};
  const std::array<double, 3> nodes3{-1.0, 0.0, 1.0};
  std::array<double, 5> num{};
  std::array<double, 3> pow{};
  for (std::size_t i = 0; i < 5; ++i) {
    const Moments m = moments_along(y, gy, nodes5[i] * scale);
    num[i] = numerator(m);
  }
  for (std::size_t i = 0; i < 3; ++i) pow[i] = moments_along(y, gy, nodes3[i] * scale).m2;

  LineContrast lc;
  lc.numerator = interpolate<4>(num, nodes5, scale);
  lc.power = interpolate<2>(pow, nodes3, scale);
  return lc;
}

std::array<double, 6> stationarity_polynomial(const LineContrast& lc) {
  const auto& n = lc.numerator;
  const auto& q = lc.power;
  const std::array<double, 4> dn{n[1], 2.0 * n[2], 3.0 * n[3], 4.0 * n[4]};
  const std::array<double, 2> dq{q[1], 2.0 * q[2]};
  std::array<double, 6> p{};
  for (std::size_t i = 0; i < dn.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) p[i + j] += dn[i] * q[j];
  for (std::size_t i = 0; i < n.size(); ++i)
    for (std::size_t j = 0; j < dq.size(); ++j) p[i + j] -= 2.0 * n[i] * dq[j];
  return p;
}

double contrast_along(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy, double mu) {
  const Moments m = moments_along(y, gy, mu);
  if (!(m.m2 > 0.0)) throw UndefinedContrast("zero-energy output along search line");
  return numerator(m) / (m.m2 * m.m2);
}

Quartic step_poly_from_outputs(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy) {
  const auto p = stationarity_polynomial(line_contrast(y, gy));
  Quartic out;
  for (std::size_t k = 0; k < 5; ++k) out.a[k] = p[k];
  return out;
}

Quartic step_poly(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u, const Eigen::VectorXcd& g) {
  if (g.squaredNorm() == 0.0) throw InvalidArgument("search direction is zero");
  return step_poly_from_outputs(extract_output(z, u), extract_output(z, g));
}

}  // namespace fdbss
