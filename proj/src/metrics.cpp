#include "fdbss/metrics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

#include "fdbss/error.hpp"

namespace fdbss {

using Eigen::Index;
using cd = std::complex<double>;

namespace {

constexpr double kRidge = 1e-10;

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

Eigen::VectorXcd spectrum(const Eigen::VectorXd& x, Index nfft) {
  std::vector<double> in(static_cast<std::size_t>(nfft), 0.0);
  for (Index k = 0; k < x.size(); ++k) in[static_cast<std::size_t>(k)] = x[k];
  std::vector<cd> out;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  fft.fwd(out, in);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Index>(out.size()));
}

Eigen::VectorXd inverse(const Eigen::VectorXcd& half, Index nfft) {
  std::vector<cd> in(half.data(), half.data() + half.size());
  std::vector<double> out;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  fft.inv(out, in, nfft);
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Index>(out.size()));
}

double ratio_db(double num, double den) {
  if (!(num > 0.0)) throw UndefinedMetric("target component has zero energy");
  if (!(den > 0.0)) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(num / den));
}

}  // namespace

DelayProjector::DelayProjector(const Eigen::MatrixXd& references, Index filter_len)
    : refs_(references), L_(filter_len) {
  const Index n = refs_.rows();
  const Index K = refs_.cols();
  if (n < 1) throw InvalidArgument("no references");
  if (L_ < 1 || L_ > K / 4) throw InvalidArgument("filter length must lie in [1, K/4]");
  for (Index j = 0; j < n; ++j)
    if (refs_.row(j).squaredNorm() == 0.0) throw InvalidArgument("reference " + std::to_string(j) + " is all zero");

  nfft_ = next_pow2(K + L_);
  for (Index j = 0; j < n; ++j) ref_spectra_.push_back(spectrum(refs_.row(j).transpose(), nfft_));

  // Block (i, j) entry [a][b] = sum_k s_i(k - a) s_j(k - b) over k < K.
  // First row/column from linear correlations, the rest by the diagonal
  // recurrence G[a+1][b+1] = G[a][b] - s_i(K-1-a) s_j(K-1-b).
  Eigen::MatrixXd gram(n * L_, n * L_);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const Eigen::VectorXd rij = inverse(ref_spectra_[i].cwiseProduct(ref_spectra_[j].conjugate()), nfft_);
      const Eigen::VectorXd rji = inverse(ref_spectra_[j].cwiseProduct(ref_spectra_[i].conjugate()), nfft_);
      auto block = gram.block(i * L_, j * L_, L_, L_);
      for (Index b = 0; b < L_; ++b) block(0, b) = rij[b];
      for (Index a = 1; a < L_; ++a) block(a, 0) = rji[a];
      for (Index a = 1; a < L_; ++a)
        for (Index b = 1; b < L_; ++b)
          block(a, b) = block(a - 1, b - 1) - refs_(i, K - a) * refs_(j, K - b);
      if (j != i) gram.block(j * L_, i * L_, L_, L_) = block.transpose();
    }
  }
  const double ridge = kRidge * gram.diagonal().mean();
  for (Index j = 0; j < n; ++j) {
    Eigen::MatrixXd g = gram.block(j * L_, j * L_, L_, L_);
    g.diagonal().array() += ridge;
    single_.emplace_back(g);
  }
  gram.diagonal().array() += ridge;
  all_.compute(gram);
  if (all_.info() != Eigen::Success) throw InvalidArgument("reference Gram matrix is not positive definite");
}

Eigen::VectorXd DelayProjector::correlations(const Eigen::VectorXd& estimate) const {
  if (estimate.size() != length()) throw InvalidArgument("estimate length differs from references");
  const Eigen::VectorXcd es = spectrum(estimate, nfft_);
  Eigen::VectorXd c(sources() * L_);
  for (Index j = 0; j < sources(); ++j) {
    // sum_k e(k) s_j(k - d)
    const Eigen::VectorXd r = inverse(es.cwiseProduct(ref_spectra_[j].conjugate()), nfft_);
    c.segment(j * L_, L_) = r.head(L_);
  }
  return c;
}

Eigen::VectorXd DelayProjector::synthesize(const Eigen::VectorXd& coeffs, Index first_ref, Index refs) const {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(nfft_ / 2 + 1);
  for (Index j = 0; j < refs; ++j) {
    const Eigen::VectorXcd filt = spectrum(coeffs.segment(j * L_, L_), nfft_);
    acc += filt.cwiseProduct(ref_spectra_[first_ref + j]);
  }
  return inverse(acc, nfft_).head(length());
}

double DelayProjector::target_energy(const Eigen::VectorXd& estimate, Index j) const {
  const Eigen::VectorXd c = correlations(estimate).segment(j * L_, L_);
  return c.dot(single_[j].solve(c));
}

DecompositionResult DelayProjector::decompose(const Eigen::VectorXd& estimate, Index j) const {
  if (j < 0 || j >= sources()) throw InvalidArgument("reference index out of range");
  const Eigen::VectorXd c = correlations(estimate);
  DecompositionResult d;
  d.filter_len = L_;
  d.reference = j;
  d.s_target = synthesize(single_[j].solve(c.segment(j * L_, L_)), j, 1);
  const Eigen::VectorXd all = synthesize(all_.solve(c), 0, sources());
  d.e_interf = all - d.s_target;
  d.e_artif = estimate - all;
  return d;
}

DecompositionResult bss_decompose(const Eigen::VectorXd& estimate, const Eigen::MatrixXd& references,
                                  Index filter_len) {
  const DelayProjector proj(references, filter_len);
  Index best = 0;
  double best_energy = -1.0;
  for (Index j = 0; j < references.rows(); ++j) {
    const double e = proj.target_energy(estimate, j);
    if (e > best_energy) {
      best_energy = e;
      best = j;
    }
  }
  return proj.decompose(estimate, best);
}

double sir_db(const DecompositionResult& d) { return ratio_db(d.s_target.squaredNorm(), d.e_interf.squaredNorm()); }

double sdr_db(const DecompositionResult& d) {
  return ratio_db(d.s_target.squaredNorm(), (d.e_interf + d.e_artif).squaredNorm());
}

SeparationScores evaluate_separation(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& references,
                                     Index filter_len) {
  if (estimates.cols() != references.cols()) throw InvalidArgument("estimates and references differ in length");
  const DelayProjector proj(references, filter_len);
  const Index ne = estimates.rows();
  const Index nr = references.rows();

  Eigen::MatrixXd energy(ne, nr);
  for (Index i = 0; i < ne; ++i)
    for (Index j = 0; j < nr; ++j) energy(i, j) = proj.target_energy(estimates.row(i).transpose(), j);

  // Greedy: repeatedly take the largest remaining (estimate, reference) pair.
  std::vector<Index> match(static_cast<std::size_t>(ne), -1);
  std::vector<bool> est_used(static_cast<std::size_t>(ne), false), ref_used(static_cast<std::size_t>(nr), false);
  for (Index round = 0; round < std::min(ne, nr); ++round) {
    double best = -1.0;
    Index bi = -1, bj = -1;
    for (Index i = 0; i < ne; ++i) {
      if (est_used[static_cast<std::size_t>(i)]) continue;
      for (Index j = 0; j < nr; ++j) {
        if (ref_used[static_cast<std::size_t>(j)]) continue;
        if (energy(i, j) > best) {
          best = energy(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    match[static_cast<std::size_t>(bi)] = bj;
    est_used[static_cast<std::size_t>(bi)] = true;
    ref_used[static_cast<std::size_t>(bj)] = true;
  }
  // Surplus estimates fall back to their best reference.
  for (Index i = 0; i < ne; ++i) {
    if (match[static_cast<std::size_t>(i)] >= 0) continue;
    Index j = 0;
    energy.row(i).maxCoeff(&j);
    match[static_cast<std::size_t>(i)] = j;
  }

  SeparationScores scores;
  for (Index i = 0; i < ne; ++i) {
    const DecompositionResult d = proj.decompose(estimates.row(i).transpose(), match[static_cast<std::size_t>(i)]);
    scores.sir_db.push_back(sir_db(d));
    scores.sdr_db.push_back(sdr_db(d));
    scores.matched_reference.push_back(d.reference);
  }
  return scores;
}

double amari_index(const Eigen::MatrixXcd& P) {
  const Index n = P.rows();
  if (n < 2 || P.cols() != n) throw InvalidArgument("Amari index needs a square matrix of size >= 2");
  const Eigen::MatrixXd a = P.cwiseAbs();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double mx = a.row(i).maxCoeff();
    if (!(mx > 0.0)) throw InvalidArgument("zero row in Amari index");
    total += a.row(i).sum() / mx - 1.0;
  }
  for (Index j = 0; j < n; ++j) {
    const double mx = a.col(j).maxCoeff();
    if (!(mx > 0.0)) throw InvalidArgument("zero column in Amari index");
    total += a.col(j).sum() / mx - 1.0;
  }
  return total / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace fdbss
