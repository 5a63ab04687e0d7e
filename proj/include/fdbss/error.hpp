#pragma once

#include <stdexcept>
#include <string>

namespace fdbss {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Regularized covariance is not positive definite; a larger regularization
/// constant is needed.
class NumericalRankError : public Error {
 public:
  using Error::Error;
};

/// Kurtosis is undefined for a zero-energy output.
class UndefinedContrast : public Error {
 public:
  using Error::Error;
};

class DegeneratePolynomial : public Error {
 public:
  using Error::Error;
};

/// No usable step-size candidate survived filtering.
class NoStep : public Error {
 public:
  using Error::Error;
};

class DegenerateWindow : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

/// Pipeline failure tagged with the stage and frequency bin that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, long bin, const std::string& what)
      : Error(stage + (bin >= 0 ? " (bin " + std::to_string(bin) + ")" : std::string()) + ": " + what),
        stage_(std::move(stage)),
        bin_(bin) {}

  const std::string& stage() const noexcept { return stage_; }
  long bin() const noexcept { return bin_; }

 private:
  std::string stage_;
  long bin_;
};

}  // namespace fdbss
