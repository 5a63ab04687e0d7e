#include "fdbss/mixsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fdbss/error.hpp"
#include "fdbss/rng.hpp"

namespace fdbss {

using Eigen::Index;

void FirMixingSystem::validate() const {
  if (taps.empty() || taps.front().empty()) throw InvalidArgument("mixing system has no filters");
  const Index L = length();
  if (L < 1) throw InvalidArgument("mixing filters must have at least one tap");
  for (const auto& row : taps) {
    if (static_cast<Index>(row.size()) != sources()) throw InvalidArgument("ragged mixing system");
    for (const auto& h : row) {
      if (h.size() != L) throw InvalidArgument("mixing filters differ in length");
      if (!h.allFinite()) throw InvalidArgument("mixing filter has non-finite taps");
    }
  }
}

Eigen::MatrixXd FirMixingSystem::lag(Index p) const {
  Eigen::MatrixXd h(sensors(), sources());
  for (Index j = 0; j < sensors(); ++j)
    for (Index i = 0; i < sources(); ++i) h(j, i) = taps[j][i][p];
  return h;
}

Eigen::MatrixXcd FirMixingSystem::response(Index w, Index T) const {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(sensors(), sources());
  for (Index p = 0; p < length(); ++p) {
    const double phase = -2.0 * M_PI * static_cast<double>(w) * static_cast<double>(p) / static_cast<double>(T);
    h += lag(p).cast<std::complex<double>>() * std::polar(1.0, phase);
  }
  return h;
}

FirMixingSystem FirMixingSystem::identity(Index n, int sample_rate_hz) {
  FirMixingSystem sys;
  sys.sample_rate_hz = sample_rate_hz;
  sys.taps.assign(static_cast<std::size_t>(n), std::vector<Eigen::VectorXd>(static_cast<std::size_t>(n)));
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) sys.taps[j][i] = Eigen::VectorXd::Constant(1, j == i ? 1.0 : 0.0);
  return sys;
}

FirMixingSystem gen_rir(std::uint64_t seed, Index sensors, Index sources, Index taps, double t60_ms,
                        int sample_rate_hz) {
  if (taps < 1) throw InvalidArgument("filter length must be at least 1");
  if (sensors < 1 || sources < 1) throw InvalidArgument("need at least one sensor and one source");
  if (!(t60_ms > 0.0)) throw InvalidArgument("t60 must be positive");
  if (sample_rate_hz <= 0) throw InvalidArgument("sample rate must be positive");

  const double decay_samples = static_cast<double>(sample_rate_hz) * t60_ms / 1000.0;
  Rng rng(seed);
  FirMixingSystem sys;
  sys.sample_rate_hz = sample_rate_hz;
  sys.taps.assign(static_cast<std::size_t>(sensors), std::vector<Eigen::VectorXd>(static_cast<std::size_t>(sources)));
  for (Index j = 0; j < sensors; ++j) {
    for (Index i = 0; i < sources; ++i) {
      Eigen::VectorXd h(taps);
      for (Index k = 0; k < taps; ++k)
        h[k] = rng.normal() * std::pow(10.0, -3.0 * static_cast<double>(k) / decay_samples);
      const double norm = h.norm();
      sys.taps[j][i] = norm > 0.0 ? Eigen::VectorXd(h / norm) : h;
    }
  }
  return sys;
}

MultichannelWave convolve_mix(const MultichannelWave& sources, const FirMixingSystem& system) {
  sources.validate();
  system.validate();
  if (sources.channels() != system.sources())
    throw InvalidArgument("source count " + std::to_string(sources.channels()) + " does not match mixing system (" +
                          std::to_string(system.sources()) + ")");
  if (sources.sample_rate_hz != system.sample_rate_hz) throw InvalidArgument("sample rates differ");

  const Index K = sources.length();
  const Index L = system.length();
  MultichannelWave out;
  out.sample_rate_hz = sources.sample_rate_hz;
  out.samples = Eigen::MatrixXd::Zero(system.sensors(), K);
  for (Index j = 0; j < system.sensors(); ++j) {
    for (Index i = 0; i < system.sources(); ++i) {
      const Eigen::VectorXd& h = system.taps[j][i];
      for (Index p = 0; p < std::min(L, K); ++p) {
        if (h[p] == 0.0) continue;
        out.samples.row(j).segment(p, K - p) += h[p] * sources.samples.row(i).segment(0, K - p);
      }
    }
  }
  return out;
}

Eigen::VectorXd speech_like_source(std::uint64_t seed, Index samples, int sample_rate_hz) {
  if (samples < 1) throw InvalidArgument("need at least one sample");
  Rng rng(seed);
  const double fs = static_cast<double>(sample_rate_hz);

  // Two formant-like resonators with random centre frequencies.
  struct Resonator {
    double a1, a2;
  };
  Resonator res[2];
  const double lo[2] = {250.0, 1000.0};
  const double hi[2] = {900.0, 3000.0};
  for (int r = 0; r < 2; ++r) {
    const double f = rng.uniform(lo[r], std::min(hi[r], 0.45 * fs));
    const double radius = rng.uniform(0.90, 0.97);
    res[r] = {2.0 * radius * std::cos(2.0 * M_PI * f / fs), -radius * radius};
  }

  // Envelope: exp of a slow AR(1) process (~80 ms correlation), gated by
  // syllable-length on/off segments with raised-cosine ramps.
  const double env_pole = std::exp(-1.0 / (0.08 * fs));
  const double env_gain = std::sqrt(1.0 - env_pole * env_pole);
  double env_state = rng.normal();
  const Index ramp = std::max<Index>(1, static_cast<Index>(0.015 * fs));

  Eigen::VectorXd gate(samples);
  Index k = 0;
  bool on = rng.uniform() < 0.7;
  while (k < samples) {
    const double seconds = on ? rng.uniform(0.12, 0.45) : rng.uniform(0.05, 0.30);
    const Index len = std::max<Index>(1, static_cast<Index>(seconds * fs));
    for (Index n = 0; n < len && k < samples; ++n, ++k) {
      double g = on ? 1.0 : 0.02;
      if (on && n < ramp) g = 0.02 + 0.98 * 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(n) / ramp));
      if (on && len - n <= ramp)
        g = std::min(g, 0.02 + 0.98 * 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(len - n) / ramp)));
      gate[k] = g;
    }
    on = !on;
  }

  Eigen::VectorXd out(samples);
  double y1[2] = {0.0, 0.0}, y2[2] = {0.0, 0.0};
  for (Index n = 0; n < samples; ++n) {
    env_state = env_pole * env_state + env_gain * rng.normal();
    double v = rng.normal();
    for (int r = 0; r < 2; ++r) {
      const double y = v + res[r].a1 * y1[r] + res[r].a2 * y2[r];
      y2[r] = y1[r];
      y1[r] = y;
      v = y;
    }
    out[n] = v * std::exp(0.8 * env_state) * gate[n];
  }
  const double rms = std::sqrt(out.squaredNorm() / static_cast<double>(samples));
  if (rms > 0.0) out *= 0.05 / rms;
  return out;
}

MultichannelWave speech_like_sources(std::uint64_t seed, Index n, Index samples, int sample_rate_hz) {
  MultichannelWave out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(n, samples);
  for (Index i = 0; i < n; ++i)
    out.samples.row(i) = speech_like_source(seed * 1000003ULL + static_cast<std::uint64_t>(i) * 7919ULL + 17ULL, samples,
                                            sample_rate_hz)
                             .transpose();
  return out;
}

}  // namespace fdbss
