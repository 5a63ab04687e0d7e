#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

namespace fdbss {

/// M channels of K samples at a common rate. Rows are channels.
struct MultichannelWave {
  Eigen::MatrixXd samples;
  int sample_rate_hz = 16000;

  Eigen::Index channels() const { return samples.rows(); }
  Eigen::Index length() const { return samples.cols(); }

  /// Throws InvalidArgument unless K >= 1, M >= 1, the rate is positive and
  /// every sample is finite.
  void validate() const;
};

enum class WavEncoding { pcm16, float32 };

/// Reads RIFF/WAVE in PCM16, PCM24 or IEEE float32. Integer PCM is scaled by
/// 2^-(bits-1), so -32768 maps to exactly -1.
MultichannelWave read_wav(const std::filesystem::path& path);

/// Samples are clipped to [-1, 1] first. float32 output is lossless for
/// samples that are exactly representable as float.
void write_wav(const std::filesystem::path& path, const MultichannelWave& wave, WavEncoding encoding);

/// Stacks the channels of several waves (equal length and rate required).
MultichannelWave stack_channels(const std::vector<MultichannelWave>& waves);

/// Single channel `c` of `wave` as its own wave.
MultichannelWave channel(const MultichannelWave& wave, Eigen::Index c);

}  // namespace fdbss
