#include "fdbss/robust_ica.hpp"

#include <cmath>
#include <limits>

#include "fdbss/error.hpp"
#include "fdbss/rng.hpp"

namespace fdbss {

using Eigen::Index;
using cd = std::complex<double>;

namespace {

constexpr double kRealRootTolerance = 1e-6;
// Tangential gradient below this fraction of the full gradient means u is
// already a stationary point on the sphere.
constexpr double kStationaryTolerance = 1e-12;

Eigen::VectorXcd random_unit(Rng& rng, Index n) {
  Eigen::VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.complex_normal();
  return v.normalized();
}

// First canonical basis vector, starting from index `first`, that survives
// projection onto the complement of `prior`.
Eigen::VectorXcd complement_vector(Index n, Index first, const std::vector<Eigen::VectorXcd>& prior) {
  Eigen::VectorXcd best;
  double best_norm = -1.0;
  for (Index k = 0; k < n; ++k) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e[(first + k) % n] = 1.0;
    const Eigen::VectorXcd v = orthogonalize(e, prior);
    const double norm = v.norm();
    if (norm > 0.5) return v / norm;
    if (norm > best_norm) {
      best_norm = norm;
      best = v;
    }
  }
  return best / best_norm;
}

}  // namespace

double select_step_from_outputs(const Eigen::VectorXcd& y, const Eigen::VectorXcd& gy,
                                const std::vector<std::complex<double>>& roots) {
  std::vector<double> candidates;
  for (const cd& r : roots)
    if (std::abs(r.imag()) <= kRealRootTolerance * std::max(1.0, std::abs(r.real()))) candidates.push_back(r.real());
  if (candidates.empty())
    for (const cd& r : roots) candidates.push_back(r.real());

  double best_mu = 0.0;
  double best_abs = -1.0;
  for (double mu : candidates) {
    if (!std::isfinite(mu)) continue;
    double k = 0.0;
    try {
      k = contrast_along(y, gy, mu);
    } catch (const UndefinedContrast&) {
      continue;
    }
    if (std::abs(k) > best_abs) {
      best_abs = std::abs(k);
      best_mu = mu;
    }
  }
  if (best_abs < 0.0) throw NoStep("no step-size candidate gives a defined contrast");
  return best_mu;
}

double select_step(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u, const Eigen::VectorXcd& g,
                   const std::vector<std::complex<double>>& roots) {
  return select_step_from_outputs(extract_output(z, u), extract_output(z, g), roots);
}

Eigen::VectorXcd orthogonalize(const Eigen::VectorXcd& u, const std::vector<Eigen::VectorXcd>& prior) {
  Eigen::VectorXcd v = u;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& p : prior) v -= p.dot(v) * p;
  return v;
}

Extraction extract_component(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u0,
                             const std::vector<Eigen::VectorXcd>& prior, const IcaOptions& opts) {
  const Index n = z.rows();
  if (u0.size() != n) throw InvalidArgument("initial extractor length does not match data rows");
  if (u0.squaredNorm() == 0.0) throw InvalidArgument("initial extractor is zero");
  if (static_cast<Index>(prior.size()) >= n) throw InvalidArgument("no directions left to extract");

  Eigen::VectorXcd u = orthogonalize(u0, prior);
  if (u.norm() < 1e-8 * u0.norm())
    u = complement_vector(n, static_cast<Index>(prior.size()), prior);
  else
    u.normalize();

  ExtractionState state;
  if (static_cast<Index>(prior.size()) == n - 1) {
    // Gram-Schmidt leaves a single admissible direction.
    state.converged = true;
    state.u = u;
    return {u, extract_output(z, u), state};
  }
  for (int l = 1; l <= opts.max_iter; ++l) {
    state.iteration = l;
    const Eigen::VectorXcd y = extract_output(z, u);
    if (!(y.squaredNorm() > 0.0)) {
      state.stalled = true;
      break;
    }
    const Eigen::VectorXcd g = kurtosis_gradient(z, u);
    // u_new = u - mu g, searched as y + mu (-g)^H z.
    const Eigen::VectorXcd d = -g;
    const Eigen::VectorXcd tangent = orthogonalize(d - u.dot(d) * u, prior);
    if (tangent.norm() <= kStationaryTolerance * std::max(d.norm(), std::numeric_limits<double>::min())) {
      state.mu_opt = 0.0;
      state.converged = true;
      break;
    }

    const Eigen::VectorXcd dy = extract_output(z, d);
    double mu = 0.0;
    try {
      mu = select_step_from_outputs(y, dy, solve_quartic(step_poly_from_outputs(y, dy)));
    } catch (const DegeneratePolynomial&) {
      // Contrast is flat along the whole line: nothing left to gain.
      state.converged = true;
      break;
    } catch (const NoStep&) {
      state.stalled = true;
      break;
    }
    const double k_now = std::abs(kurtosis(y));
    if (std::abs(contrast_along(y, dy, mu)) < k_now - 1e-12 * std::max(1.0, k_now)) {
      state.stalled = true;
      break;
    }

    Eigen::VectorXcd next = orthogonalize(u + mu * d, prior);
    const double norm = next.norm();
    if (!(norm > 0.0) || !next.allFinite()) {
      state.stalled = true;
      break;
    }
    next /= norm;
    state.mu_opt = mu;
    const double overlap = std::abs(next.dot(u));
    u = next;
    if (overlap >= 1.0 - opts.conv_tol) {
      state.converged = true;
      break;
    }
  }

  state.u = u;
  return {u, extract_output(z, u), state};
}

Eigen::MatrixXcd deflate_subtract(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& y) {
  if (y.size() != z.cols()) throw InvalidArgument("output length does not match data columns");
  const double energy = y.squaredNorm();
  if (!(energy > 0.0)) throw InvalidArgument("cannot deflate a zero-energy output");
  // Row-vector convention: y is 1 x Q, so z y^H = z * conj(y).
  const Eigen::VectorXcd h = (z * y.conjugate()) / energy;
  return z - h * y.transpose();
}

BinDemixing demix_bin(const Eigen::MatrixXcd& z, const IcaOptions& opts) {
  const Index n = z.rows();
  if (n < 1) throw InvalidArgument("no components to extract");

  BinDemixing out;
  out.U = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::VectorXcd> found;
  std::optional<Rng> rng;
  if (opts.random_init_seed) rng.emplace(*opts.random_init_seed);

  Eigen::MatrixXcd residual = z;
  for (Index k = 0; k < n; ++k) {
    Eigen::VectorXcd u0 = Eigen::VectorXcd::Zero(n);
    if (rng)
      u0 = random_unit(*rng, n);
    else
      u0[k] = 1.0;

    Extraction ex = extract_component(residual, u0, found, opts);
    out.U.col(k) = ex.u;
    out.states.push_back(ex.state);
    found.push_back(ex.u);

    if (ex.state.stalled) {
      out.partial = true;
      for (Index r = k + 1; r < n; ++r) {
        const Eigen::VectorXcd v = complement_vector(n, r, found);
        out.U.col(r) = v;
        ExtractionState filled;
        filled.u = v;
        out.states.push_back(filled);
        found.push_back(v);
      }
      break;
    }
    if (k + 1 < n) {
      const Eigen::VectorXcd y = extract_output(residual, ex.u);
      if (y.squaredNorm() > 0.0) residual = deflate_subtract(residual, y);
    }
  }
  return out;
}

}  // namespace fdbss
