#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fdbss/wave.hpp"

namespace fdbss {

/// FIR mixing system: taps[j][i] is the length-L filter from source i to
/// sensor j.
struct FirMixingSystem {
  std::vector<std::vector<Eigen::VectorXd>> taps;
  int sample_rate_hz = 16000;

  Eigen::Index sensors() const { return static_cast<Eigen::Index>(taps.size()); }
  Eigen::Index sources() const { return taps.empty() ? 0 : static_cast<Eigen::Index>(taps.front().size()); }
  Eigen::Index length() const { return taps.empty() || taps.front().empty() ? 0 : taps.front().front().size(); }

  void validate() const;

  /// M x N matrix of taps at lag p.
  Eigen::MatrixXd lag(Eigen::Index p) const;

  /// Frequency response at DFT bin w of a length-T transform.
  Eigen::MatrixXcd response(Eigen::Index w, Eigen::Index T) const;

  static FirMixingSystem identity(Eigen::Index n, int sample_rate_hz);
};

/// Synthetic room responses: each filter is i.i.d. standard normal noise
/// shaped by a 60 dB-per-T60 exponential decay, then scaled to unit energy.
FirMixingSystem gen_rir(std::uint64_t seed, Eigen::Index sensors, Eigen::Index sources, Eigen::Index taps,
                        double t60_ms, int sample_rate_hz);

/// x_j(k) = sum_i sum_p taps[j][i][p] s_i(k - p), truncated to the source
/// length.
MultichannelWave convolve_mix(const MultichannelWave& sources, const FirMixingSystem& system);

/// Speech-like test signal: Gaussian noise coloured by two AR(2) resonators
/// and amplitude-modulated by a slowly varying log-normal envelope with
/// pauses. Strongly super-Gaussian; scaled to an RMS of 0.05.
Eigen::VectorXd speech_like_source(std::uint64_t seed, Eigen::Index samples, int sample_rate_hz);

/// N independent speech_like_source channels (seeds derived from `seed`).
MultichannelWave speech_like_sources(std::uint64_t seed, Eigen::Index n, Eigen::Index samples, int sample_rate_hz);

}  // namespace fdbss
