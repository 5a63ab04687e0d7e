#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdbss/permutation.hpp"
#include "fdbss/stft.hpp"
#include "fdbss/wave.hpp"
#include "fdbss/window.hpp"

namespace fdbss {

struct PipelineConfig {
  Eigen::Index fft_size = 1024;
  WindowKind window = WindowKind::hamming;
  double overlap_ratio = 0.65;
  double reg_m = 1e-3;
  int max_iter = 100;
  double conv_tol = 1e-6;
  PermMethod perm_method = PermMethod::method5;
  std::optional<Eigen::Index> profile_frames;  // "all" when unset
  std::uint64_t seed = 0;
  Eigen::Index filter_len_eval = 1024;

  WindowSpec window_spec() const { return {window, fft_size, overlap_ratio}; }
  void validate() const;
};

/// Flat JSON object with keys fft_size_T, window, overlap_ratio, reg_m,
/// max_iter, conv_tol, perm_method, profile_Tf, seed, filter_len_eval.
nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);

/// Overrides fields of `base` with any keys present in `j`; unknown keys are
/// rejected.
PipelineConfig config_from_json(const nlohmann::ordered_json& j, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

struct RunOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Wall-clock and process-CPU milliseconds per stage.
struct StageTimes {
  std::map<std::string, double> wall_ms;
  std::map<std::string, double> cpu_ms;
};

struct SeparationResult {
  MultichannelWave estimates;
  DemixingSet set;
  /// Full per-bin demixing P D U^H Lambda^{-1/2} V^H, N x M, bins 0..T/2.
  std::vector<Eigen::MatrixXcd> demixing;
  /// Bins whose deflation stalled and were completed from the complement.
  std::vector<Eigen::Index> partial_bins;
  Eigen::Index frames = 0;
  StageTimes times;
};

/// stft -> per-bin whitening and RobustICA -> minimal-distortion rescale ->
/// permutation alignment -> istft. Errors are rethrown as StageError with the
/// stage name and bin index.
SeparationResult separate(const MultichannelWave& mixture, const PipelineConfig& cfg, const RunOptions& run = {});

/// Little-endian sidecar: magic "FDBSSDMX", uint32 T, uint32 N, then T/2+1
/// N x N matrices, row-major, interleaved real/imag doubles.
void write_demixing(const std::filesystem::path& path, Eigen::Index fft_size,
                    const std::vector<Eigen::MatrixXcd>& demixing);

struct DemixingFile {
  Eigen::Index fft_size = 0;
  std::vector<Eigen::MatrixXcd> demixing;
};
DemixingFile read_demixing(const std::filesystem::path& path);

}  // namespace fdbss
