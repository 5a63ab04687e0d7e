#pragma once

#include <Eigen/Dense>
#include <string>

namespace fdbss {

enum class WindowKind { hann, hamming, rectangular };

std::string to_string(WindowKind kind);
WindowKind window_kind_from_string(const std::string& name);

struct WindowSpec {
  WindowKind kind = WindowKind::hamming;
  Eigen::Index length = 1024;
  double overlap_ratio = 0.65;

  /// Hop size round(T * (1 - overlap)).
  Eigen::Index shift() const;

  /// Throws InvalidArgument for odd or too-short T, overlap outside
  /// [0.5, 0.95) or a zero hop.
  void validate() const;
};

/// Periodic window of length T: hann 0.5(1 - cos(2 pi n / T)), hamming
/// 0.54 - 0.46 cos(2 pi n / T), rectangular all ones.
Eigen::VectorXd make_window(const WindowSpec& spec);

}  // namespace fdbss
