#include "fdbss/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

#include "fdbss/error.hpp"

namespace fdbss {

using Eigen::Index;

Eigen::MatrixXcd Spectrogram::bin(Index w) const {
  Eigen::MatrixXcd out(num_channels(), frames());
  for (Index c = 0; c < num_channels(); ++c) out.row(c) = channels[static_cast<std::size_t>(c)].col(w).transpose();
  return out;
}

void Spectrogram::set_bin(Index w, const Eigen::MatrixXcd& values) {
  if (values.rows() != num_channels() || values.cols() != frames())
    throw InvalidArgument("bin data does not match spectrogram shape");
  for (Index c = 0; c < num_channels(); ++c) channels[static_cast<std::size_t>(c)].col(w) = values.row(c).transpose();
}

Index stft_frame_count(Index K, const WindowSpec& spec) {
  const Index T = spec.length;
  const Index shift = spec.shift();
  const Index padded = (T - shift) + K;
  if (padded <= T) return 1;
  return (padded - T + shift - 1) / shift + 1;
}

Spectrogram stft(const MultichannelWave& wave, const WindowSpec& spec) {
  spec.validate();
  wave.validate();
  const Index T = spec.length;
  const Index K = wave.length();
  if (K < T) throw InvalidArgument("signal shorter than one window");

  Spectrogram out;
  out.window = spec;
  out.sample_rate_hz = wave.sample_rate_hz;
  out.original_length = K;
  out.pad_front = T - spec.shift();

  const Eigen::VectorXd win = make_window(spec);
  const Index Q = stft_frame_count(K, spec);
  const Index B = T / 2 + 1;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> frame(static_cast<std::size_t>(T));
  std::vector<std::complex<double>> spectrum;
  for (Index c = 0; c < wave.channels(); ++c) {
    Eigen::MatrixXcd data(Q, B);
    for (Index q = 0; q < Q; ++q) {
      const Index start = out.frame_start(q);
      for (Index n = 0; n < T; ++n) {
        const Index k = start + n;
        const double x = (k >= 0 && k < K) ? wave.samples(c, k) : 0.0;
        frame[static_cast<std::size_t>(n)] = x * win[n];
      }
      fft.fwd(spectrum, frame);
      for (Index b = 0; b < B; ++b) data(q, b) = spectrum[static_cast<std::size_t>(b)];
      // A real frame has exactly real DC and Nyquist bins.
      data(q, 0).imag(0.0);
      data(q, B - 1).imag(0.0);
    }
    out.channels.push_back(std::move(data));
  }
  return out;
}

MultichannelWave istft(const Spectrogram& spec) {
  spec.window.validate();
  const Index T = spec.window.length;
  const Index B = T / 2 + 1;
  const Index K = spec.original_length;
  const Index Q = spec.frames();
  for (const auto& ch : spec.channels)
    if (ch.rows() != Q || ch.cols() != B) throw InvalidArgument("inconsistent spectrogram shape");

  const Eigen::VectorXd win = make_window(spec.window);
  Eigen::VectorXd power = Eigen::VectorXd::Zero(K);
  for (Index q = 0; q < Q; ++q) {
    const Index start = spec.frame_start(q);
    for (Index n = 0; n < T; ++n) {
      const Index k = start + n;
      if (k >= 0 && k < K) power[k] += win[n] * win[n];
    }
  }
  for (Index k = 0; k < K; ++k)
    if (!(power[k] > 1e-12)) throw DegenerateWindow("zero window power at sample " + std::to_string(k));

  MultichannelWave out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.samples = Eigen::MatrixXd::Zero(spec.num_channels(), K);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> full(static_cast<std::size_t>(T));
  std::vector<std::complex<double>> frame;
  for (Index c = 0; c < spec.num_channels(); ++c) {
    const Eigen::MatrixXcd& data = spec.channels[static_cast<std::size_t>(c)];
    for (Index q = 0; q < Q; ++q) {
      const Eigen::VectorXcd extended = symmetric_extend(Eigen::VectorXcd(data.row(q).transpose()));
      for (Index n = 0; n < T; ++n) full[static_cast<std::size_t>(n)] = extended[n];
      fft.inv(frame, full);
      const Index start = spec.frame_start(q);
      for (Index n = 0; n < T; ++n) {
        const Index k = start + n;
        if (k >= 0 && k < K) out.samples(c, k) += win[n] * frame[static_cast<std::size_t>(n)].real();
      }
    }
    out.samples.row(c).array() /= power.transpose().array();
  }
  return out;
}

Eigen::MatrixXcd symmetric_extend(const Eigen::MatrixXcd& half_bins) {
  const Index B = half_bins.cols();
  if (B < 2) throw InvalidArgument("half spectrum needs at least two bins");
  const Index T = 2 * (B - 1);
  Eigen::MatrixXcd full(half_bins.rows(), T);
  full.leftCols(B) = half_bins;
  for (Index w = 1; w < T / 2; ++w) full.col(T - w) = half_bins.col(w).conjugate();
  return full;
}

Eigen::VectorXcd symmetric_extend(const Eigen::VectorXcd& half_bins) {
  return symmetric_extend(Eigen::MatrixXcd(half_bins.transpose())).row(0).transpose();
}

}  // namespace fdbss
