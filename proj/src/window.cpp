#include "fdbss/window.hpp"

#include <cmath>

#include "fdbss/error.hpp"

namespace fdbss {

std::string to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::hann:
      return "hann";
    case WindowKind::hamming:
      return "hamming";
    case WindowKind::rectangular:
      return "rectangular";
  }
  return "unknown";
}

WindowKind window_kind_from_string(const std::string& name) {
  if (name == "hann" || name == "hanning") return WindowKind::hann;
  if (name == "hamming") return WindowKind::hamming;
  if (name == "rectangular" || name == "rect") return WindowKind::rectangular;
  throw InvalidArgument("unknown window kind '" + name + "'");
}

Eigen::Index WindowSpec::shift() const {
  return static_cast<Eigen::Index>(std::lround(static_cast<double>(length) * (1.0 - overlap_ratio)));
}

void WindowSpec::validate() const {
  if (length < 4) throw InvalidArgument("window length must be at least 4");
  if (length % 2 != 0) throw InvalidArgument("window length must be even");
  if (!(overlap_ratio >= 0.5 && overlap_ratio < 0.95)) throw InvalidArgument("overlap ratio must lie in [0.5, 0.95)");
  if (shift() < 1) throw InvalidArgument("window hop rounds to zero");
}

Eigen::VectorXd make_window(const WindowSpec& spec) {
  spec.validate();
  const Eigen::Index T = spec.length;
  Eigen::VectorXd w(T);
  for (Eigen::Index n = 0; n < T; ++n) {
    const double c = std::cos(2.0 * M_PI * static_cast<double>(n) / static_cast<double>(T));
    switch (spec.kind) {
      case WindowKind::hann:
        w[n] = 0.5 * (1.0 - c);
        break;
      case WindowKind::hamming:
        w[n] = 0.54 - 0.46 * c;
        break;
      case WindowKind::rectangular:
        w[n] = 1.0;
        break;
    }
  }
  return w;
}

}  // namespace fdbss
