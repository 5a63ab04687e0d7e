#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdbss/pipeline.hpp"

namespace fdbss {

enum class BenchAxis { perm_method, window, overlap, fft_size, signal_length };

BenchAxis bench_axis_from_string(const std::string& name);
std::string to_string(BenchAxis axis);

/// Synthetic convolutive scenario: speech-like sources through random
/// exponentially decaying room responses.
struct Scenario {
  Eigen::Index sources = 2;
  double duration_s = 9.0;
  Eigen::Index rir_taps = 256;
  double t60_ms = 160.0;
  int sample_rate_hz = 16000;
  std::uint64_t seed = 1;
};

struct ScenarioSignals {
  MultichannelWave sources;
  MultichannelWave mixture;
};

ScenarioSignals make_scenario(const Scenario& scenario);

struct BenchRow {
  std::string axis;
  std::string value;
  std::string source;  // source index, or "mean"
  double sir_db = 0.0;
  double sdr_db = 0.0;
  double cpu_stft_ms = 0.0;
  double cpu_ica_ms = 0.0;
  double cpu_perm_ms = 0.0;
  double cpu_total_ms = 0.0;
  Eigen::Index frames = 0;
};

struct BenchOptions {
  BenchAxis axis = BenchAxis::perm_method;
  /// Sweep values as strings; empty means the axis default set.
  std::vector<std::string> values;
  Scenario scenario;
  PipelineConfig base;
  RunOptions run;
  /// Also emit one row per source after each sweep point's mean row.
  bool per_source = false;
};

std::vector<std::string> default_sweep(BenchAxis axis);

std::vector<BenchRow> run_bench(const BenchOptions& opts);

inline constexpr const char* kBenchHeader =
    "axis,value,source,sir_db,sdr_db,cpu_stft_ms,cpu_ica_ms,cpu_perm_ms,cpu_total_ms";

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace fdbss
