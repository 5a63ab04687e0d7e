#include "fdbss/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <numeric>

#include "fdbss/error.hpp"
#include "fdbss/parallel.hpp"
#include "fdbss/robust_ica.hpp"
#include "fdbss/scaling.hpp"
#include "fdbss/whiten.hpp"

namespace fdbss {

using Eigen::Index;

void PipelineConfig::validate() const {
  window_spec().validate();
  if (!(reg_m >= 0.0)) throw InvalidArgument("reg_m must be non-negative");
  if (max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (!(conv_tol > 0.0)) throw InvalidArgument("conv_tol must be positive");
  if (profile_frames && *profile_frames < 1) throw InvalidArgument("profile_Tf must be positive");
  if (filter_len_eval < 1) throw InvalidArgument("filter_len_eval must be positive");
}

nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["fft_size_T"] = cfg.fft_size;
  j["window"] = to_string(cfg.window);
  j["overlap_ratio"] = cfg.overlap_ratio;
  j["reg_m"] = cfg.reg_m;
  j["max_iter"] = cfg.max_iter;
  j["conv_tol"] = cfg.conv_tol;
  j["perm_method"] = to_string(cfg.perm_method);
  if (cfg.profile_frames)
    j["profile_Tf"] = *cfg.profile_frames;
  else
    j["profile_Tf"] = "all";
  j["seed"] = cfg.seed;
  j["filter_len_eval"] = cfg.filter_len_eval;
  return j;
}

PipelineConfig config_from_json(const nlohmann::ordered_json& j, PipelineConfig base) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "fft_size_T")
        base.fft_size = v.get<Index>();
      else if (key == "window")
        base.window = window_kind_from_string(v.get<std::string>());
      else if (key == "overlap_ratio")
        base.overlap_ratio = v.get<double>();
      else if (key == "reg_m")
        base.reg_m = v.get<double>();
      else if (key == "max_iter")
        base.max_iter = v.get<int>();
      else if (key == "conv_tol")
        base.conv_tol = v.get<double>();
      else if (key == "perm_method")
        base.perm_method = perm_method_from_string(v.get<std::string>());
      else if (key == "profile_Tf") {
        if (v.is_string() && v.get<std::string>() == "all")
          base.profile_frames.reset();
        else
          base.profile_frames = v.get<Index>();
      } else if (key == "seed")
        base.seed = v.get<std::uint64_t>();
      else if (key == "filter_len_eval")
        base.filter_len_eval = v.get<Index>();
      else
        throw ParseError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what());
  }
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return config_from_json(nlohmann::ordered_json::parse(in), base);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

class StageClock {
 public:
  explicit StageClock(StageTimes& times) : times_(times) {}

  void start() {
    wall_ = std::chrono::steady_clock::now();
    cpu_ = std::clock();
  }

  void stop(const std::string& stage) {
    const auto wall = std::chrono::steady_clock::now();
    const std::clock_t cpu = std::clock();
    times_.wall_ms[stage] += std::chrono::duration<double, std::milli>(wall - wall_).count();
    times_.cpu_ms[stage] += 1000.0 * static_cast<double>(cpu - cpu_) / CLOCKS_PER_SEC;
  }

 private:
  StageTimes& times_;
  std::chrono::steady_clock::time_point wall_;
  std::clock_t cpu_ = 0;
};

template <class Fn>
void per_bin(const char* stage, std::size_t bins, unsigned threads, Fn&& fn) {
  parallel_for(bins, threads, [&](std::size_t w) {
    try {
      fn(w);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, static_cast<long>(w), e.what());
    }
  });
}

}  // namespace

SeparationResult separate(const MultichannelWave& mixture, const PipelineConfig& cfg, const RunOptions& run) {
  cfg.validate();
  mixture.validate();
  const unsigned threads = run.threads == 0 ? default_thread_count() : run.threads;
  const Index n = mixture.channels();

  SeparationResult out;
  StageClock clock(out.times);

  clock.start();
  Spectrogram spec;
  try {
    spec = stft(mixture, cfg.window_spec());
  } catch (const std::exception& e) {
    throw StageError("stft", -1, e.what());
  }
  clock.stop("stft");
  out.frames = spec.frames();
  if (spec.frames() < n) throw StageError("stft", -1, "fewer STFT frames than channels");

  const auto F = static_cast<std::size_t>(spec.bins());
  std::vector<Eigen::MatrixXcd> observed(F), whiteners(F), separated(F);
  std::vector<Eigen::MatrixXcd> unitary(F);
  std::vector<char> partial(F, 0);

  clock.start();
  std::vector<Eigen::MatrixXcd> whitened(F);
  per_bin("whiten", F, threads, [&](std::size_t w) {
    observed[w] = spec.bin(static_cast<Index>(w));
    WhiteningBundle wb = whiten_bin(observed[w], cfg.reg_m);
    whiteners[w] = std::move(wb.whitener);
    whitened[w] = std::move(wb.Z);
  });
  clock.stop("whiten");

  clock.start();
  IcaOptions ica;
  ica.max_iter = cfg.max_iter;
  ica.conv_tol = cfg.conv_tol;
  per_bin("ica", F, threads, [&](std::size_t w) {
    BinDemixing dm = demix_bin(whitened[w], ica);
    partial[w] = dm.partial ? 1 : 0;
    separated[w] = dm.U.adjoint() * whitened[w];
    unitary[w] = std::move(dm.U);
  });
  clock.stop("ica");

  clock.start();
  std::vector<Eigen::VectorXcd> scales(F);
  std::vector<Eigen::MatrixXcd> rescaled(F);
  per_bin("scaling", F, threads, [&](std::size_t w) {
    Rescaled r = minimal_distortion_rescale(observed[w], separated[w]);
    scales[w] = std::move(r.D);
    rescaled[w] = std::move(r.Y);
  });
  clock.stop("scaling");

  clock.start();
  Alignment alignment;
  try {
    AlignOptions ao;
    ao.profile_frames = cfg.profile_frames;
    ao.seed = cfg.seed;
    alignment = align_all(rescaled, cfg.perm_method, ao);
  } catch (const std::exception& e) {
    throw StageError("permutation", -1, e.what());
  }

  // Global labels ordered by descending broadband energy.
  std::vector<double> energy(static_cast<std::size_t>(n), 0.0);
  for (std::size_t w = 0; w < F; ++w)
    for (Index m = 0; m < n; ++m)
      energy[static_cast<std::size_t>(m)] += rescaled[w].row(alignment.gamma[w][static_cast<std::size_t>(m)]).squaredNorm();
  Permutation order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return energy[static_cast<std::size_t>(a)] > energy[static_cast<std::size_t>(b)];
  });

  out.set.window = cfg.window_spec();
  out.set.U = unitary;
  out.set.D = scales;
  out.set.gamma.resize(F);
  for (std::size_t w = 0; w < F; ++w) out.set.gamma[w] = compose(alignment.gamma[w], order);
  const std::vector<Eigen::MatrixXcd> aligned = apply_alignment(separated, out.set);

  out.demixing.resize(F);
  for (std::size_t w = 0; w < F; ++w) {
    Eigen::MatrixXcd core = scales[w].asDiagonal() * unitary[w].adjoint() * whiteners[w];
    Eigen::MatrixXcd permuted(n, core.cols());
    for (Index m = 0; m < n; ++m) permuted.row(m) = core.row(out.set.gamma[w][static_cast<std::size_t>(m)]);
    out.demixing[w] = std::move(permuted);
    if (partial[w]) out.partial_bins.push_back(static_cast<Index>(w));
  }
  clock.stop("permutation");

  clock.start();
  Spectrogram result = spec;
  for (std::size_t w = 0; w < F; ++w) result.set_bin(static_cast<Index>(w), aligned[w]);
  try {
    out.estimates = istft(result);
  } catch (const std::exception& e) {
    throw StageError("istft", -1, e.what());
  }
  clock.stop("istft");
  return out;
}

namespace {

constexpr char kDemixMagic[8] = {'F', 'D', 'B', 'S', 'S', 'D', 'M', 'X'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t get_le(std::istream& in, int bytes, const std::string& where) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), bytes);
  if (!in) throw ParseError(where + ": truncated demixing file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_demixing(const std::filesystem::path& path, Index fft_size, const std::vector<Eigen::MatrixXcd>& demixing) {
  const auto bins = static_cast<std::size_t>(fft_size / 2 + 1);
  if (demixing.size() != bins) throw InvalidArgument("demixing set must cover bins 0..T/2");
  const Index n = demixing.front().rows();
  for (const auto& w : demixing)
    if (w.rows() != n || w.cols() != n) throw InvalidArgument("demixing matrices must all be N x N");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kDemixMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(fft_size));
  put_u32(out, static_cast<std::uint32_t>(n));
  for (const auto& w : demixing)
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) {
        put_f64(out, w(r, c).real());
        put_f64(out, w(r, c).imag());
      }
  if (!out) throw IoError("write failed: " + path.string());
}

DemixingFile read_demixing(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string where = path.string();
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kDemixMagic, 8) != 0) throw ParseError(where + ": not a demixing file");
  DemixingFile f;
  f.fft_size = static_cast<Index>(get_le(in, 4, where));
  const auto n = static_cast<Index>(get_le(in, 4, where));
  if (f.fft_size < 2 || n < 1) throw ParseError(where + ": bad header");
  f.demixing.resize(static_cast<std::size_t>(f.fft_size / 2 + 1));
  for (auto& w : f.demixing) {
    w.resize(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) {
        const double re = std::bit_cast<double>(get_le(in, 8, where));
        const double im = std::bit_cast<double>(get_le(in, 8, where));
        w(r, c) = {re, im};
      }
  }
  return f;
}

}  // namespace fdbss
