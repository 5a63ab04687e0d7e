#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fdbss/bench.hpp"
#include "fdbss/error.hpp"
#include "fdbss/metrics.hpp"
#include "fdbss/mixsim.hpp"
#include "fdbss/pipeline.hpp"
#include "fdbss/report.hpp"
#include "fdbss/wave.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config with pipeline keys")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)");
  cmd->add_option("--out", c.out, "Output directory");
}

// Flags that override individual pipeline settings.
struct PipelineFlags {
  std::optional<long> fft_size;
  std::optional<std::string> window;
  std::optional<double> overlap;
  std::optional<double> reg_m;
  std::optional<int> max_iter;
  std::optional<double> conv_tol;
  std::optional<std::string> perm_method;
  std::optional<std::string> profile_frames;
  std::optional<long> filter_len;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--fft-size", f.fft_size, "DFT length T");
  cmd->add_option("--window", f.window, "hann | hamming | rectangular");
  cmd->add_option("--overlap", f.overlap, "Frame overlap ratio in [0.5, 0.95)");
  cmd->add_option("--reg", f.reg_m, "Covariance regularization factor");
  cmd->add_option("--max-iter", f.max_iter, "RobustICA iteration cap per component");
  cmd->add_option("--tol", f.conv_tol, "RobustICA convergence tolerance");
  cmd->add_option("--perm-method", f.perm_method, "method1 .. method6");
  cmd->add_option("--profile-frames", f.profile_frames, "Frames used for profiles, or 'all'");
  cmd->add_option("--filter-len", f.filter_len, "Distortion filter length for SIR/SDR");
}

fdbss::PipelineConfig resolve_config(const Common& c, const PipelineFlags& f) {
  fdbss::PipelineConfig cfg;
  if (!c.config.empty()) cfg = fdbss::load_config(c.config, cfg);
  ordered_json o = ordered_json::object();
  if (f.fft_size) o["fft_size_T"] = *f.fft_size;
  if (f.window) o["window"] = *f.window;
  if (f.overlap) o["overlap_ratio"] = *f.overlap;
  if (f.reg_m) o["reg_m"] = *f.reg_m;
  if (f.max_iter) o["max_iter"] = *f.max_iter;
  if (f.conv_tol) o["conv_tol"] = *f.conv_tol;
  if (f.perm_method) o["perm_method"] = *f.perm_method;
  if (f.profile_frames) {
    if (*f.profile_frames == "all")
      o["profile_Tf"] = "all";
    else
      o["profile_Tf"] = std::stol(*f.profile_frames);
  }
  if (f.filter_len) o["filter_len_eval"] = *f.filter_len;
  if (c.seed) o["seed"] = *c.seed;
  cfg = fdbss::config_from_json(o, cfg);
  cfg.validate();
  return cfg;
}

fdbss::MultichannelWave load_stacked(const std::vector<std::string>& paths) {
  std::vector<fdbss::MultichannelWave> waves;
  for (const auto& p : paths) waves.push_back(fdbss::read_wav(p));
  return waves.size() == 1 ? waves.front() : fdbss::stack_channels(waves);
}

fdbss::WavEncoding encoding_from(const std::string& name) {
  if (name == "pcm16") return fdbss::WavEncoding::pcm16;
  if (name == "float32") return fdbss::WavEncoding::float32;
  throw fdbss::InvalidArgument("unknown encoding '" + name + "' (expected pcm16 or float32)");
}

void print_scores(const fdbss::SeparationReport& r) {
  for (std::size_t i = 0; i < r.per_source_sir_db.size(); ++i)
    std::cout << "source " << i << ": SIR " << r.per_source_sir_db[i] << " dB, SDR " << r.per_source_sdr_db[i]
              << " dB\n";
}

// mix -----------------------------------------------------------------------

struct MixArgs {
  std::vector<std::string> sources;
  int synthetic = 0;
  double duration_s = 9.0;
  int sample_rate = 16000;
  long taps = 256;
  double t60_ms = 160.0;
  bool identity = false;
  std::string encoding = "float32";
};

int run_mix(const Common& c, const MixArgs& a) {
  if (a.sources.empty() == (a.synthetic == 0))
    throw fdbss::InvalidArgument("give either --sources or --synthetic N");
  const std::uint64_t seed = c.seed.value_or(0);
  fs::create_directories(c.out);
  const fs::path out(c.out);

  fdbss::MultichannelWave sources;
  if (a.synthetic > 0) {
    const auto samples = static_cast<Eigen::Index>(std::llround(a.duration_s * a.sample_rate));
    sources = fdbss::speech_like_sources(seed, a.synthetic, samples, a.sample_rate);
    fdbss::write_wav(out / "sources.wav", sources, encoding_from(a.encoding));
  } else {
    sources = load_stacked(a.sources);
  }
  sources.validate();

  const Eigen::Index n = sources.channels();
  const fdbss::FirMixingSystem system =
      a.identity ? fdbss::FirMixingSystem::identity(n, sources.sample_rate_hz)
                 : fdbss::gen_rir(seed, n, n, a.taps, a.t60_ms, sources.sample_rate_hz);
  const fdbss::MultichannelWave mixture = fdbss::convolve_mix(sources, system);
  fdbss::write_wav(out / "mixture.wav", mixture, encoding_from(a.encoding));

  ordered_json taps = ordered_json::array();
  for (const auto& row : system.taps) {
    ordered_json r = ordered_json::array();
    for (const auto& h : row) r.push_back(std::vector<double>(h.data(), h.data() + h.size()));
    taps.push_back(r);
  }
  std::ofstream(out / "taps.json") << taps.dump() << '\n';

  ordered_json side;
  side["seed"] = seed;
  side["L"] = system.length();
  side["t60_ms"] = a.identity ? 0.0 : a.t60_ms;
  side["sample_rate_hz"] = sources.sample_rate_hz;
  side["sources"] = n;
  side["taps_path"] = "taps.json";
  std::ofstream(out / "mixture.json") << side.dump(2) << '\n';
  std::cout << "wrote " << (out / "mixture.wav").string() << '\n';
  return 0;
}

// separate ------------------------------------------------------------------

struct SeparateArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> references;
  std::string encoding = "float32";
  bool no_timing = false;
};

int run_separate(const Common& c, const PipelineFlags& f, const SeparateArgs& a) {
  const fdbss::PipelineConfig cfg = resolve_config(c, f);
  const fdbss::MultichannelWave mixture = load_stacked(a.inputs);
  std::optional<fdbss::MultichannelWave> refs;
  if (!a.references.empty()) {
    refs = load_stacked(a.references);
    if (refs->length() != mixture.length())
      throw fdbss::InvalidArgument("reference length differs from mixture length");
  }

  const fdbss::SeparationResult res = fdbss::separate(mixture, cfg, {c.threads});
  fs::create_directories(c.out);
  const fs::path out(c.out);
  const auto enc = encoding_from(a.encoding);
  for (Eigen::Index n = 0; n < res.estimates.channels(); ++n)
    fdbss::write_wav(out / ("source_" + std::to_string(n) + ".wav"), fdbss::channel(res.estimates, n), enc);
  fdbss::write_demixing(out / "demixing.bin", cfg.fft_size, res.demixing);

  fdbss::SeparationReport report;
  report.sources = static_cast<int>(res.estimates.channels());
  if (!a.no_timing) report.stage_times_ms = res.times.wall_ms;
  report.config_snapshot = fdbss::config_to_json(cfg);
  if (refs) {
    const auto scores = fdbss::evaluate_separation(res.estimates.samples, refs->samples, cfg.filter_len_eval);
    report.per_source_sir_db = scores.sir_db;
    report.per_source_sdr_db = scores.sdr_db;
  }
  fdbss::write_report(out / "report.json", report);
  if (!res.partial_bins.empty())
    std::cerr << "warning: " << res.partial_bins.size() << " bins completed from the orthogonal complement\n";
  print_scores(report);
  return 0;
}

// evaluate ------------------------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> estimates;
  std::vector<std::string> references;
  std::optional<long> filter_len;
};

int run_evaluate(const Common& c, const EvaluateArgs& a) {
  fdbss::PipelineConfig cfg;
  if (!c.config.empty()) cfg = fdbss::load_config(c.config, cfg);
  if (a.filter_len) cfg.filter_len_eval = *a.filter_len;
  const fdbss::MultichannelWave est = load_stacked(a.estimates);
  const fdbss::MultichannelWave ref = load_stacked(a.references);
  if (est.length() != ref.length())
    throw fdbss::InvalidArgument("estimates have " + std::to_string(est.length()) + " samples, references " +
                                 std::to_string(ref.length()));

  const auto scores = fdbss::evaluate_separation(est.samples, ref.samples, cfg.filter_len_eval);
  fdbss::SeparationReport report;
  report.sources = static_cast<int>(est.channels());
  report.per_source_sir_db = scores.sir_db;
  report.per_source_sdr_db = scores.sdr_db;
  report.config_snapshot = fdbss::config_to_json(cfg);
  fs::create_directories(c.out);
  fdbss::write_report(fs::path(c.out) / "report.json", report);
  print_scores(report);
  return 0;
}

// bench ---------------------------------------------------------------------

struct BenchArgs {
  std::string axis;
  std::vector<std::string> values;
  int sources = 2;
  double duration_s = 9.0;
  long taps = 256;
  double t60_ms = 160.0;
  bool per_source = false;
  bool to_stdout = false;
};

int run_bench(const Common& c, const PipelineFlags& f, const BenchArgs& a) {
  fdbss::BenchOptions opts;
  opts.axis = fdbss::bench_axis_from_string(a.axis);
  opts.values = a.values;
  opts.base = resolve_config(c, f);
  opts.run.threads = c.threads;
  opts.per_source = a.per_source;
  opts.scenario.sources = a.sources;
  opts.scenario.duration_s = a.duration_s;
  opts.scenario.rir_taps = a.taps;
  opts.scenario.t60_ms = a.t60_ms;
  opts.scenario.seed = c.seed.value_or(1);

  const auto rows = fdbss::run_bench(opts);
  for (const auto& r : rows)
    if (r.source == "mean") std::cerr << a.axis << '=' << r.value << ": " << r.frames << " frames\n";
  if (a.to_stdout) {
    fdbss::write_bench_csv(std::cout, rows);
  } else {
    fs::create_directories(c.out);
    const fs::path path = fs::path(c.out) / ("bench_" + a.axis + ".csv");
    std::ofstream file(path);
    if (!file) throw fdbss::IoError("cannot open " + path.string());
    fdbss::write_bench_csv(file, rows);
    std::cout << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain blind source separation of convolutive mixtures"};
  app.require_subcommand(1);

  Common common;
  PipelineFlags flags;

  MixArgs mix;
  auto* mix_cmd = app.add_subcommand("mix", "Mix sources through synthetic room responses");
  add_common(mix_cmd, common);
  mix_cmd->add_option("--sources", mix.sources, "Source WAVs (channels are stacked)")->check(CLI::ExistingFile);
  mix_cmd->add_option("--synthetic", mix.synthetic, "Generate N speech-like sources instead");
  mix_cmd->add_option("--duration", mix.duration_s, "Synthetic source length in seconds");
  mix_cmd->add_option("--rate", mix.sample_rate, "Synthetic sample rate in Hz");
  mix_cmd->add_option("--taps", mix.taps, "Room response length L");
  mix_cmd->add_option("--t60", mix.t60_ms, "Reverberation time in ms");
  mix_cmd->add_flag("--identity", mix.identity, "Use the identity mixing system (L = 1)");
  mix_cmd->add_option("--encoding", mix.encoding, "pcm16 | float32");

  SeparateArgs sep;
  auto* sep_cmd = app.add_subcommand("separate", "Separate a multichannel mixture");
  add_common(sep_cmd, common);
  add_pipeline_flags(sep_cmd, flags);
  sep_cmd->add_option("input", sep.inputs, "Mixture WAV(s)")->required()->check(CLI::ExistingFile);
  sep_cmd->add_option("--reference", sep.references, "Reference source WAV(s) for SIR/SDR")
      ->check(CLI::ExistingFile);
  sep_cmd->add_option("--encoding", sep.encoding, "pcm16 | float32");
  sep_cmd->add_flag("--no-timing", sep.no_timing, "Leave stage timings out of the report");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score estimates against references");
  add_common(ev_cmd, common);
  ev_cmd->add_option("--estimates", ev.estimates, "Estimated source WAV(s)")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--references", ev.references, "Reference source WAV(s)")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--filter-len", ev.filter_len, "Distortion filter length");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Parameter sweep on a synthetic scenario, CSV output");
  add_common(bench_cmd, common);
  add_pipeline_flags(bench_cmd, flags);
  bench_cmd->add_option("--axis", bench.axis, "perm_method | window | overlap | fft_size | signal_length")
      ->required();
  bench_cmd->add_option("--values", bench.values, "Sweep values (default: the axis default set)");
  bench_cmd->add_option("--sources", bench.sources, "Number of sources");
  bench_cmd->add_option("--duration", bench.duration_s, "Signal length in seconds");
  bench_cmd->add_option("--taps", bench.taps, "Room response length L");
  bench_cmd->add_option("--t60", bench.t60_ms, "Reverberation time in ms");
  bench_cmd->add_flag("--per-source", bench.per_source, "Add one row per source after each mean row");
  bench_cmd->add_flag("--stdout", bench.to_stdout, "Write CSV to stdout instead of --out");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mix_cmd) return run_mix(common, mix);
    if (*sep_cmd) return run_separate(common, flags, sep);
    if (*ev_cmd) return run_evaluate(common, ev);
    if (*bench_cmd) return run_bench(common, flags, bench);
  } catch (const fdbss::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    for (auto* sub : app.get_subcommands()) std::cerr << sub->help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
