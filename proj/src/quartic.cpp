#include "fdbss/quartic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fdbss/error.hpp"

namespace fdbss {

using cd = std::complex<double>;

namespace {

constexpr double kResidualTolerance = 1e-8;
constexpr double kLeadingZero = 1e-13;

cd horner(const Quartic& p, cd x, cd* derivative) {
  cd v = 0.0;
  cd d = 0.0;
  for (int k = 4; k >= 0; --k) {
    d = d * x + v;
    v = v * x + p.a[static_cast<std::size_t>(k)];
  }
  if (derivative) *derivative = d;
  return v;
}

cd polish(const Quartic& p, cd x) {
  cd best = x;
  double best_res = std::abs(horner(p, x, nullptr));
  for (int it = 0; it < 8 && best_res > 0.0; ++it) {
    cd d;
    const cd v = horner(p, best, &d);
    if (d == cd(0.0)) break;
    const cd next = best - v / d;
    const double res = std::abs(horner(p, next, nullptr));
    if (!(res < best_res)) break;
    best = next;
    best_res = res;
  }
  return best;
}

// Ferrari on the monic quartic x^4 + b3 x^3 + b2 x^2 + b1 x + b0.
std::vector<cd> ferrari(double b3, double b2, double b1, double b0) {
  const double shift = b3 / 4.0;
  const double sq = b3 * b3;
  const double p = b2 - 3.0 * sq / 8.0;
  const double q = b1 - b3 * b2 / 2.0 + sq * b3 / 8.0;
  const double r = b0 - b3 * b1 / 4.0 + sq * b2 / 16.0 - 3.0 * sq * sq / 256.0;

  std::vector<cd> roots;
  roots.reserve(4);
  // Resolvent: y^3 - (p/2) y^2 - r y + (p r / 2 - q^2 / 8) = 0.
  const auto ys = solve_monic_cubic(-p / 2.0, -r, p * r / 2.0 - q * q / 8.0);
  cd y = ys[0];
  for (const cd& cand : ys)
    if (std::abs(2.0 * cand - p) > std::abs(2.0 * y - p)) y = cand;
  const cd A = std::sqrt(2.0 * y - p);

  const double scale = std::max({std::abs(p), std::sqrt(std::abs(r)), std::cbrt(std::abs(q)), 1e-300});
  if (std::abs(A) <= 1e-12 * std::sqrt(scale)) {
    // Biquadratic: x^4 + p x^2 + r.
    const auto x2 = solve_quadratic(1.0, p, r);
    for (const cd& s : x2) {
      const cd x = std::sqrt(s);
      roots.push_back(x - shift);
      roots.push_back(-x - shift);
    }
    return roots;
  }
  const cd B = -q / (2.0 * A);
  for (const cd& x : solve_quadratic(1.0, -A, y - B)) roots.push_back(x - shift);
  for (const cd& x : solve_quadratic(1.0, A, y + B)) roots.push_back(x - shift);
  return roots;
}

std::vector<cd> companion_roots(const std::vector<double>& coeffs) {
  // coeffs[k] multiplies x^k; the leading coefficient is nonzero.
  const int degree = static_cast<int>(coeffs.size()) - 1;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) c(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
  Eigen::EigenSolver<Eigen::MatrixXd> eig(c, false);
  std::vector<cd> roots;
  for (int i = 0; i < degree; ++i) roots.push_back(eig.eigenvalues()[i]);
  return roots;
}

}  // namespace

double Quartic::operator()(double mu) const {
  double v = 0.0;
  for (int k = 4; k >= 0; --k) v = v * mu + a[static_cast<std::size_t>(k)];
  return v;
}

std::complex<double> Quartic::operator()(std::complex<double> mu) const { return horner(*this, mu, nullptr); }

double Quartic::max_abs_coefficient() const {
  double m = 0.0;
  for (double c : a) m = std::max(m, std::abs(c));
  return m;
}

double relative_residual(const Quartic& p, std::complex<double> r) {
  const double m = p.max_abs_coefficient();
  const double s = std::max(1.0, std::abs(r));
  return std::abs(p(r)) / (m * s * s * s * s);
}

std::array<cd, 2> solve_quadratic(cd a, cd b, cd c) {
  const cd d = std::sqrt(b * b - 4.0 * a * c);
  const cd t = (std::real(std::conj(b) * d) >= 0.0) ? -(b + d) : -(b - d);
  if (t == cd(0.0)) return {cd(0.0), cd(0.0)};
  return {t / (2.0 * a), 2.0 * c / t};
}

std::array<cd, 3> solve_monic_cubic(cd a, cd b, cd c) {
  const cd shift = a / 3.0;
  const cd P = b - a * a / 3.0;
  const cd Q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const cd disc = std::sqrt(Q * Q / 4.0 + P * P * P / 27.0);
  cd u3 = -Q / 2.0 + disc;
  const cd alt = -Q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  if (u3 == cd(0.0)) return {-shift, -shift, -shift};
  const cd u = std::pow(u3, 1.0 / 3.0);
  const cd omega(-0.5, std::sqrt(3.0) / 2.0);
  std::array<cd, 3> roots;
  cd uk = u;
  for (auto& r : roots) {
    r = uk - P / (3.0 * uk) - shift;
    uk *= omega;
  }
  return roots;
}

std::vector<std::complex<double>> solve_quartic(const Quartic& p) {
  const double m = p.max_abs_coefficient();
  if (!(m > 0.0)) throw DegeneratePolynomial("all polynomial coefficients are zero");

  int degree = 4;
  while (degree > 0 && std::abs(p.a[static_cast<std::size_t>(degree)]) <= kLeadingZero * m) --degree;
  if (degree == 0) return {};

  const double lead = p.a[static_cast<std::size_t>(degree)];
  std::vector<cd> roots;
  switch (degree) {
    case 1:
      roots.push_back(-p.a[0] / p.a[1]);
      break;
    case 2: {
      const auto r = solve_quadratic(p.a[2], p.a[1], p.a[0]);
      roots.assign(r.begin(), r.end());
      break;
    }
    case 3: {
      const auto r = solve_monic_cubic(p.a[2] / lead, p.a[1] / lead, p.a[0] / lead);
      roots.assign(r.begin(), r.end());
      break;
    }
    default:
      roots = ferrari(p.a[3] / lead, p.a[2] / lead, p.a[1] / lead, p.a[0] / lead);
      break;
  }

  Quartic truncated = p;
  for (int k = degree + 1; k <= 4; ++k) truncated.a[static_cast<std::size_t>(k)] = 0.0;

  bool ok = true;
  for (auto& r : roots) {
    r = polish(truncated, r);
    if (!(relative_residual(p, r) <= kResidualTolerance)) ok = false;
  }
  if (ok || degree < 2) return roots;

  std::vector<double> coeffs(truncated.a.begin(), truncated.a.begin() + degree + 1);
  roots = companion_roots(coeffs);
  for (auto& r : roots) r = polish(truncated, r);
  return roots;
}

}  // namespace fdbss
