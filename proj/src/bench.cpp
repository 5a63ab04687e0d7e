#include "fdbss/bench.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "fdbss/error.hpp"
#include "fdbss/metrics.hpp"
#include "fdbss/mixsim.hpp"

namespace fdbss {

using Eigen::Index;

BenchAxis bench_axis_from_string(const std::string& name) {
  if (name == "perm_method") return BenchAxis::perm_method;
  if (name == "window") return BenchAxis::window;
  if (name == "overlap") return BenchAxis::overlap;
  if (name == "fft_size") return BenchAxis::fft_size;
  if (name == "signal_length") return BenchAxis::signal_length;
  throw InvalidArgument("unknown sweep axis '" + name +
                        "' (expected perm_method, window, overlap, fft_size or signal_length)");
}

std::string to_string(BenchAxis axis) {
  switch (axis) {
    case BenchAxis::perm_method:
      return "perm_method";
    case BenchAxis::window:
      return "window";
    case BenchAxis::overlap:
      return "overlap";
    case BenchAxis::fft_size:
      return "fft_size";
    case BenchAxis::signal_length:
      return "signal_length";
  }
  return "unknown";
}

std::vector<std::string> default_sweep(BenchAxis axis) {
  switch (axis) {
    case BenchAxis::perm_method:
      return {"method1", "method2", "method3", "method4", "method5", "method6"};
    case BenchAxis::window:
      return {"hann", "hamming", "rectangular"};
    case BenchAxis::overlap:
      return {"0.50", "0.65", "0.75"};
    case BenchAxis::fft_size:
      return {"256", "512", "1024", "2048"};
    case BenchAxis::signal_length:
      return {"3", "6", "9"};
  }
  return {};
}

ScenarioSignals make_scenario(const Scenario& s) {
  const auto samples = static_cast<Index>(std::llround(s.duration_s * s.sample_rate_hz));
  ScenarioSignals out;
  out.sources = speech_like_sources(s.seed, s.sources, samples, s.sample_rate_hz);
  const FirMixingSystem sys =
      gen_rir(s.seed + 0x5bd1e995ULL, s.sources, s.sources, s.rir_taps, s.t60_ms, s.sample_rate_hz);
  out.mixture = convolve_mix(out.sources, sys);
  return out;
}

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
  const std::vector<std::string> values = opts.values.empty() ? default_sweep(opts.axis) : opts.values;
  const std::string axis = to_string(opts.axis);

  ScenarioSignals fixed;
  if (opts.axis != BenchAxis::signal_length) fixed = make_scenario(opts.scenario);

  std::vector<BenchRow> rows;
  for (const std::string& value : values) {
    PipelineConfig cfg = opts.base;
    Scenario scenario = opts.scenario;
    try {
      switch (opts.axis) {
        case BenchAxis::perm_method:
          cfg.perm_method = perm_method_from_string(value);
          break;
        case BenchAxis::window:
          cfg.window = window_kind_from_string(value);
          break;
        case BenchAxis::overlap:
          cfg.overlap_ratio = std::stod(value);
          break;
        case BenchAxis::fft_size:
          cfg.fft_size = std::stol(value);
          break;
        case BenchAxis::signal_length:
          scenario.duration_s = std::stod(value);
          break;
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad sweep value '" + value + "' for axis " + axis);
    }

    const ScenarioSignals signals = opts.axis == BenchAxis::signal_length ? make_scenario(scenario) : fixed;
    const SeparationResult res = separate(signals.mixture, cfg, opts.run);
    const SeparationScores scores =
        evaluate_separation(res.estimates.samples, signals.sources.samples, cfg.filter_len_eval);

    const auto cpu = [&](const char* stage) {
      const auto it = res.times.cpu_ms.find(stage);
      return it == res.times.cpu_ms.end() ? 0.0 : it->second;
    };
    BenchRow base;
    base.axis = axis;
    base.value = value;
    base.cpu_stft_ms = cpu("stft") + cpu("istft");
    base.cpu_ica_ms = cpu("whiten") + cpu("ica");
    base.cpu_perm_ms = cpu("scaling") + cpu("permutation");
    for (const auto& [stage, ms] : res.times.cpu_ms) base.cpu_total_ms += ms;
    base.frames = res.frames;

    BenchRow mean = base;
    mean.source = "mean";
    for (std::size_t i = 0; i < scores.sir_db.size(); ++i) {
      mean.sir_db += scores.sir_db[i] / static_cast<double>(scores.sir_db.size());
      mean.sdr_db += scores.sdr_db[i] / static_cast<double>(scores.sdr_db.size());
    }
    rows.push_back(mean);
    if (opts.per_source) {
      for (std::size_t i = 0; i < scores.sir_db.size(); ++i) {
        BenchRow r = base;
        r.source = std::to_string(i);
        r.sir_db = scores.sir_db[i];
        r.sdr_db = scores.sdr_db[i];
        rows.push_back(r);
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchHeader << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& r : rows)
    out << r.axis << ',' << r.value << ',' << r.source << ',' << r.sir_db << ',' << r.sdr_db << ',' << r.cpu_stft_ms
        << ',' << r.cpu_ica_ms << ',' << r.cpu_perm_ms << ',' << r.cpu_total_ms << '\n';
}

}  // namespace fdbss
