#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fdbss/wave.hpp"
#include "fdbss/window.hpp"

namespace fdbss {

/// Half-spectrum STFT of a multichannel signal.
///
/// Frame q covers padded samples [q*shift, q*shift + T), where the signal is
/// preceded by `pad_front` = T - shift zeros and followed by enough zeros to
/// complete the last frame. Only bins 0..T/2 are stored.
struct Spectrogram {
  std::vector<Eigen::MatrixXcd> channels;  // each frames x bins
  WindowSpec window;
  int sample_rate_hz = 16000;
  Eigen::Index original_length = 0;
  Eigen::Index pad_front = 0;

  Eigen::Index num_channels() const { return static_cast<Eigen::Index>(channels.size()); }
  Eigen::Index frames() const { return channels.empty() ? 0 : channels.front().rows(); }
  Eigen::Index bins() const { return window.length / 2 + 1; }

  /// First original-signal sample index covered by frame q (may be negative).
  Eigen::Index frame_start(Eigen::Index q) const { return q * window.shift() - pad_front; }

  /// Observations at one bin: channels x frames.
  Eigen::MatrixXcd bin(Eigen::Index w) const;
  void set_bin(Eigen::Index w, const Eigen::MatrixXcd& values);
};

/// Number of frames produced for a signal of K samples.
Eigen::Index stft_frame_count(Eigen::Index K, const WindowSpec& spec);

/// Requires K >= T.
Spectrogram stft(const MultichannelWave& wave, const WindowSpec& spec);

/// Weighted overlap-add with per-sample normalization by the summed squared
/// window, exact for any supported overlap. Throws DegenerateWindow when an
/// output sample has zero window power.
MultichannelWave istft(const Spectrogram& spec);

/// Bins 0..T/2 of each row to a full Hermitian spectrum 0..T-1.
Eigen::MatrixXcd symmetric_extend(const Eigen::MatrixXcd& half_bins);
Eigen::VectorXcd symmetric_extend(const Eigen::VectorXcd& half_bins);

}  // namespace fdbss
