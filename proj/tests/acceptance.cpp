// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "fdbss/bench.hpp"
#include "fdbss/kurtosis.hpp"
#include "fdbss/metrics.hpp"
#include "fdbss/permutation.hpp"
#include "fdbss/pipeline.hpp"
#include "fdbss/quartic.hpp"
#include "fdbss/robust_ica.hpp"
#include "fdbss/scaling.hpp"
#include "fdbss/stft.hpp"
#include "fdbss/whiten.hpp"
#include "support.hpp"

using namespace fdbss;
using testing::cd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0 || secs < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %-28s %s; %.2f s", pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  if (budget_s > 0) std::printf(" (limit %.0f s)", budget_s);
  std::printf("\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// |p(r)| / (max|a_n| * max(1,|r|)^4), evaluated by Horner.
double scaled_residual(const Quartic& p, cd r) {
  cd v = 0;
  for (int k = 4; k >= 0; --k) v = v * r + p.a[k];
  double amax = 0;
  for (double a : p.a) amax = std::max(amax, std::abs(a));
  return std::abs(v) / (amax * std::pow(std::max(1.0, std::abs(r)), 4));
}

Eigen::MatrixXcd mixed_data(Rng& rng, Eigen::Index n, Eigen::Index Q) {
  Eigen::MatrixXcd S(n, Q);
  S.row(0) = testing::binary(rng, Q);
  if (n > 1) S.row(1) = testing::qpsk(rng, Q);
  if (n > 2) S.bottomRows(n - 2) = testing::random_complex(rng, n - 2, Q);
  return testing::random_complex(rng, n, n) * S;
}

double contrast_at(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u) {
  return testing::kurtosis_oracle((u.adjoint() * z).transpose());
}

Eigen::VectorXcd fd_gradient(const Eigen::MatrixXcd& z, const Eigen::VectorXcd& u, double h) {
  Eigen::VectorXcd g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double d[2];
    for (int part = 0; part < 2; ++part) {
      const cd step = part == 0 ? cd(h, 0) : cd(0, h);
      Eigen::VectorXcd up = u, dn = u;
      up[i] += step;
      dn[i] -= step;
      d[part] = (contrast_at(z, up) - contrast_at(z, dn)) / (2 * h);
    }
    g[i] = cd(d[0], d[1]);
  }
  return g;
}

// Every assignment of F rows to centroid rows, scored independently of permute_bin.
double brute_force(const Eigen::MatrixXd& F, const Eigen::MatrixXd& M, Measure measure) {
  std::vector<int> p(static_cast<std::size_t>(M.rows()));
  std::iota(p.begin(), p.end(), 0);
  double best = measure == Measure::distance ? 1e300 : -1e300;
  do {
    double v = 0;
    for (Eigen::Index m = 0; m < M.rows(); ++m) {
      const Eigen::RowVectorXd a = M.row(m), b = F.row(p[m]);
      if (measure == Measure::distance) {
        v += (a - b).squaredNorm();
      } else {
        const Eigen::RowVectorXd ac = a.array() - a.mean(), bc = b.array() - b.mean();
        v += ac.dot(bc) / std::sqrt(ac.squaredNorm() * bc.squaredNorm());
      }
    }
    best = measure == Measure::distance ? std::min(best, v) : std::max(best, v);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

struct Planted {
  std::vector<Eigen::MatrixXcd> Y;
  std::vector<Permutation> gamma;  // gamma[w][n] = row of Y[w] carrying source n
};

// Sources with distinct on/off activity shared across bins, rows shuffled per bin.
Planted planted(std::uint64_t seed, int n, int bins, int frames) {
  Rng rng(seed);
  Eigen::MatrixXd activity(n, frames);
  for (int s = 0; s < n; ++s) {
    bool on = rng.uniform() < 0.5;
    for (int q = 0; q < frames; ++q) {
      if (rng.uniform() < 0.1) on = !on;
      activity(s, q) = on ? 1.0 : 0.05;
    }
  }
  Planted p;
  for (int w = 0; w < bins; ++w) {
    Permutation perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Eigen::MatrixXcd Y(n, frames);
    for (int s = 0; s < n; ++s)
      for (int q = 0; q < frames; ++q)
        Y(perm[s], q) = activity(s, q) * (1.0 + 0.05 * rng.normal()) * std::polar(1.0, rng.uniform(0, 2 * M_PI));
    p.Y.push_back(Y);
    p.gamma.push_back(perm);
  }
  return p;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

Eigen::VectorXd fir(const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k)
    for (Eigen::Index p = 0; p < h.size() && p <= k; ++p) y[k] += h[p] * x[k - p];
  return y;
}

}  // namespace

int main() {
  criterion("stft round trip", 5, [] {
    Rng rng(101);
    double worst = 0;
    for (WindowKind kind : {WindowKind::hann, WindowKind::hamming})
      for (Eigen::Index T : {256, 1024})
        for (double ov : {0.5, 0.65, 0.75}) {
          MultichannelWave x;
          x.samples = testing::random_real(rng, 1, 3 * 16000);
          const MultichannelWave y = istft(stft(x, {kind, T, ov}));
          worst = std::max(worst, (y.samples - x.samples).cwiseAbs().maxCoeff());
        }
    return Outcome{worst <= 1e-10, fmt("max error %.2e (tol 1e-10)", worst)};
  });

  criterion("kurtosis closed forms", 1, [] {
    Rng rng(102);
    Eigen::VectorXcd qpsk(4000);
    for (Eigen::Index k = 0; k < qpsk.size(); ++k) qpsk[k] = std::polar(1.0, M_PI_2 * double((k * 7) % 4));
    const double kq = kurtosis(qpsk);
    const double kb = kurtosis(testing::binary(rng, 4000).transpose());
    const double kg = kurtosis(testing::random_complex(rng, 100000, 1));
    const bool ok = std::abs(kq + 1) <= 1e-12 && std::abs(kb + 2) <= 1e-12 && std::abs(kg) <= 0.05;
    return Outcome{ok, fmt("qpsk %.15f, binary %.15f, gaussian %.4f (tol 0.05)", kq, kb, kg)};
  });

  criterion("kurtosis gradient", 10, [] {
    Rng rng(103);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      const Eigen::Index n = 2 + t % 3;
      const Eigen::MatrixXcd z = mixed_data(rng, n, 300);
      const Eigen::VectorXcd u = testing::random_unit(rng, n);
      const Eigen::VectorXcd fd = fd_gradient(z, u, 1e-5);
      worst = std::max(worst, (kurtosis_gradient(z, u) - fd).norm() / std::max(1.0, fd.norm()));
    }
    return Outcome{worst <= 1e-5, fmt("worst relative error %.2e over 100 (tol 1e-5)", worst)};
  });

  criterion("quartic solver", 5, [] {
    Rng rng(104);
    double worst = 0;
    std::size_t roots = 0;
    for (int t = 0; t < 10000; ++t) {
      Quartic p;
      for (double& a : p.a) a = rng.normal() * std::pow(10.0, rng.uniform(-3, 3));
      if (t % 10 == 0) p.a[4] = 0.0;
      if (t % 50 == 0) p.a[3] = 0.0;
      for (const cd r : solve_quartic(p)) {
        worst = std::max(worst, scaled_residual(p, r));
        ++roots;
      }
    }
    return Outcome{worst <= 1e-8, fmt("%g roots, worst scaled residual %.2e (tol 1e-8)", double(roots), worst)};
  });

  criterion("step polynomial", 0, [] {
    Rng rng(105);
    double worst_mu5 = 0, worst_stat = 0;
    int real_roots = 0;
    for (int t = 0; t < 100; ++t) {
      const Eigen::MatrixXcd z = mixed_data(rng, 2 + t % 2, 300);
      const Eigen::VectorXcd u = testing::random_unit(rng, z.rows());
      const Eigen::VectorXcd g = kurtosis_gradient(z, u);
      const Eigen::VectorXcd y = (u.adjoint() * z).transpose(), gy = (g.adjoint() * z).transpose();
      const auto full = stationarity_polynomial(line_contrast(y, gy));
      double scale = 0;
      for (double c : full) scale = std::max(scale, std::abs(c));
      worst_mu5 = std::max(worst_mu5, std::abs(full[5]) / scale);
      for (const cd r : solve_quartic(step_poly(z, u, g))) {
        if (std::abs(r.imag()) > 1e-9 * std::max(1.0, std::abs(r.real()))) continue;
        const double mu = r.real(), h = 1e-4 * std::max(1.0, std::abs(mu));
        auto K = [&](double m) { return testing::kurtosis_oracle(y + m * gy); };
        const double d1 = (K(mu + h) - K(mu - h)) / (2 * h);
        const double d2 = (K(mu + h) - 2 * K(mu) + K(mu - h)) / (h * h);
        worst_stat = std::max(worst_stat, std::abs(d1) / std::max(1.0, std::abs(d2)));
        ++real_roots;
      }
    }
    const bool ok = worst_mu5 <= 1e-9 && worst_stat <= 1e-6 && real_roots > 0;
    return Outcome{ok, fmt("mu^5 residual %.2e (tol 1e-9), %g real roots, worst slope %.2e (tol 1e-6)", worst_mu5,
                           double(real_roots), worst_stat)};
  });

  criterion("instantaneous separation", 30, [] {
    // Scored with the default whitening regularization; the unregularized
    // count is reported alongside.
    int good = 0, good_exact = 0;
    double worst = 0;
    for (double reg : {kDefaultRegularization, 0.0}) {
      Rng rng(106);
      for (int t = 0; t < 100; ++t) {
        Eigen::MatrixXcd S(2, 5000);
        S.row(0) = testing::qpsk(rng, 5000);
        S.row(1) = testing::binary(rng, 5000);
        const Eigen::MatrixXcd H = testing::random_complex(rng, 2, 2);
        const WhiteningBundle wb = whiten_bin(H * S, reg);
        const BinDemixing dm = demix_bin(wb.Z);
        const double a = testing::amari_oracle(dm.U.adjoint() * wb.whitener * H);
        if (reg > 0) {
          worst = std::max(worst, a);
          good += a <= 0.05;
        } else {
          good_exact += a <= 0.05;
        }
      }
    }
    return Outcome{good >= 95, fmt("%g of 100 trials with Amari <= 0.05 (need 95), worst %.4f; %g without regularization",
                                   good, worst, good_exact)};
  });

  criterion("permutation oracle", 0, [] {
    Rng rng(107);
    int mismatches = 0, cases = 0;
    for (int n : {2, 3})
      for (int F = 1; F <= 8; ++F) {
        const Planted p = planted(200 + 10 * n + F, n, F, 60);
        const auto profiles = build_profiles(p.Y, ProfileKind::dominance);
        const Eigen::MatrixXd M = testing::random_real(rng, n, 60).cwiseAbs();
        for (const auto& prof : profiles)
          for (Measure measure : {Measure::distance, Measure::correlation}) {
            const double got = permute_bin(prof.values, {M}, measure).criterion;
            const double want = brute_force(prof.values, M, measure);
            mismatches += std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want));
            ++cases;
          }
      }
    double worst_recovery = 1.0;
    for (int n : {2, 3}) {
      const Planted p = planted(300 + n, n, 120, 200);
      for (PermMethod m : {PermMethod::method1, PermMethod::method2, PermMethod::method3, PermMethod::method4,
                           PermMethod::method5, PermMethod::method6}) {
        const Alignment a = align_all(p.Y, m);
        const Permutation sigma = invert(p.gamma.front());
        int hits = 0;
        for (std::size_t w = 0; w < p.gamma.size(); ++w) hits += compose(p.gamma[w], sigma) == a.gamma[w];
        worst_recovery = std::min(worst_recovery, double(hits) / double(p.gamma.size()));
      }
    }
    const bool ok = mismatches == 0 && worst_recovery >= 0.95;
    return Outcome{ok, fmt("%g/%g bins match brute force, worst recovery %.3f (need 0.95)", double(cases - mismatches),
                           double(cases), worst_recovery)};
  });

  criterion("scaling invariance", 0, [] {
    Rng rng(108);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
      const Eigen::Index n = 2 + t % 3;
      const Eigen::MatrixXcd X = testing::random_complex(rng, n, 200);
      const Eigen::MatrixXcd U = testing::random_complex(rng, n, n);
      Eigen::VectorXcd alpha(n);
      for (auto& a : alpha) a = rng.complex_normal() * std::pow(10.0, rng.uniform(-2, 2));
      const Rescaled a = minimal_distortion_rescale(X, U * X);
      const Rescaled b = minimal_distortion_rescale(X, alpha.asDiagonal() * U * X);
      worst = std::max(worst, (a.Y - b.Y).norm() / a.Y.norm());
    }
    return Outcome{worst <= 1e-9, fmt("worst relative change %.2e (tol 1e-9)", worst)};
  });

  const ScenarioSignals scene = make_scenario(Scenario{});
  double sir_1024 = 0;
  criterion("end-to-end convolutive", 180, [&] {
    PipelineConfig cfg;
    cfg.fft_size = 1024;
    cfg.perm_method = PermMethod::method5;
    const SeparationResult r = separate(scene.mixture, cfg);
    const auto in = evaluate_separation(scene.mixture.samples, scene.sources.samples, cfg.filter_len_eval);
    const auto out = evaluate_separation(r.estimates.samples, scene.sources.samples, cfg.filter_len_eval);
    sir_1024 = mean(out.sir_db);
    const double gain = sir_1024 - mean(in.sir_db), sdr = mean(out.sdr_db);
    return Outcome{gain >= 10 && sdr >= 5,
                   fmt("SIR %.2f dB (input %.2f, need +10), SDR %.2f dB (need 5)", sir_1024, mean(in.sir_db), sdr)};
  });

  criterion("fft length direction", 0, [&] {
    PipelineConfig cfg;
    cfg.fft_size = 256;
    const SeparationResult r = separate(scene.mixture, cfg);
    const double sir_256 = mean(evaluate_separation(r.estimates.samples, scene.sources.samples, cfg.filter_len_eval).sir_db);
    return Outcome{sir_256 < sir_1024, fmt("T=256 SIR %.2f dB < T=1024 SIR %.2f dB", sir_256, sir_1024)};
  });

  criterion("metrics sanity", 0, [] {
    Rng rng(109);
    const Eigen::MatrixXd refs = testing::random_real(rng, 2, 16000);
    const Eigen::VectorXd s0 = refs.row(0).transpose();
    const DecompositionResult id = bss_decompose(s0, refs, 64);
    const double id_err =
        std::max({(id.s_target - s0).cwiseAbs().maxCoeff(), id.e_interf.cwiseAbs().maxCoeff(), id.e_artif.cwiseAbs().maxCoeff()});
    const Eigen::VectorXd f = fir(s0, testing::random_real(rng, 32, 1));
    const DecompositionResult fd = bss_decompose(f, refs, 64);
    const double artif = fd.e_artif.squaredNorm() / f.squaredNorm();
    const double sir20 = sir_db(bss_decompose(s0 + 0.1 * refs.row(1).transpose(), refs, 256));
    double amari = 0;
    for (int n = 2; n <= 6; ++n) {
      std::vector<int> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), 0);
      for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
      Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
      for (int i = 0; i < n; ++i) P(i, perm[i]) = rng.complex_normal() * std::pow(10.0, rng.uniform(-3, 3));
      amari = std::max(amari, amari_index(P));
    }
    const bool ok = id_err <= 1e-9 && artif <= 1e-12 && std::abs(sir20 - 20) <= 0.5 && amari == 0.0;
    return Outcome{ok, fmt("identity error %.1e, filtered artifact ratio %.1e, 20 dB case %.2f dB", id_err, artif, sir20) +
                           fmt(", scaled-permutation Amari %g", amari)};
  });

  std::printf("%s: %d failing\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
