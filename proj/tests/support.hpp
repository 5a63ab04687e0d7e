#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>

#include "fdbss/rng.hpp"

namespace testing {

using cd = std::complex<double>;

inline Eigen::MatrixXd random_real(fdbss::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  return m;
}

inline Eigen::MatrixXcd random_complex(fdbss::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline Eigen::VectorXcd random_unit(fdbss::Rng& rng, Eigen::Index n) {
  Eigen::VectorXcd v = random_complex(rng, n, 1);
  return v / v.norm();
}

// Uniform over {1, i, -1, -i}.
inline Eigen::RowVectorXcd qpsk(fdbss::Rng& rng, Eigen::Index q) {
  static const cd symbols[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Eigen::RowVectorXcd r(q);
  for (Eigen::Index k = 0; k < q; ++k) r(k) = symbols[rng.below(4)];
  return r;
}

// Uniform over {+1, -1}.
inline Eigen::RowVectorXcd binary(fdbss::Rng& rng, Eigen::Index q) {
  Eigen::RowVectorXcd r(q);
  for (Eigen::Index k = 0; k < q; ++k) r(k) = rng.uniform() < 0.5 ? 1.0 : -1.0;
  return r;
}

// Fourth-order moments by a plain loop, independent of the library code.
inline double kurtosis_oracle(const Eigen::VectorXcd& y) {
  double m2 = 0, m4 = 0;
  cd c2 = 0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double p = std::norm(y(k));
    m2 += p;
    m4 += p * p;
    c2 += y(k) * y(k);
  }
  const double q = static_cast<double>(y.size());
  m2 /= q;
  m4 /= q;
  c2 /= q;
  return (m4 - 2 * m2 * m2 - std::norm(c2)) / (m2 * m2);
}

// Direct evaluation of the normalized Amari error from its definition.
inline double amari_oracle(const Eigen::MatrixXcd& P) {
  const Eigen::Index n = P.rows();
  double rows = 0, cols = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0, best = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      sum += std::abs(P(i, j));
      best = std::max(best, std::abs(P(i, j)));
    }
    rows += sum / best - 1;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    double sum = 0, best = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      sum += std::abs(P(i, j));
      best = std::max(best, std::abs(P(i, j)));
    }
    cols += sum / best - 1;
  }
  return (rows + cols) / (2.0 * n * (n - 1));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fdbss_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
