#include "fdbss/wave.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "fdbss/error.hpp"

namespace fdbss {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t get_u16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

struct FormatChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

void MultichannelWave::validate() const {
  if (samples.rows() < 1) throw InvalidArgument("wave has no channels");
  if (samples.cols() < 1) throw InvalidArgument("wave has no samples");
  if (sample_rate_hz <= 0) throw InvalidArgument("sample rate must be positive");
  if (!samples.allFinite()) throw InvalidArgument("wave contains non-finite samples");
}

MultichannelWave read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string() + ": ";

  if (bytes.size() < 12) throw ParseError(where + "truncated RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError(where + "not a RIFF/WAVE file");

  FormatChunk fmt;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw ParseError(where + "truncated fmt chunk");
      const std::uint8_t* f = bytes.data() + body;
      fmt.format = get_u16(f);
      fmt.channels = get_u16(f + 2);
      fmt.sample_rate = get_u32(f + 4);
      fmt.bits = get_u16(f + 14);
      if (fmt.format == kFormatExtensible) {
        if (size < 40) throw ParseError(where + "truncated extensible fmt chunk");
        fmt.format = get_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + size > bytes.size()) throw ParseError(where + "truncated data chunk");
      data = bytes.data() + body;
      data_size = size;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw ParseError(where + "missing fmt chunk");
  if (data == nullptr) throw ParseError(where + "missing data chunk");

  const bool pcm = fmt.format == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24);
  const bool flt = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm && !flt)
    throw UnsupportedFormat(where + "unsupported encoding (format " + std::to_string(fmt.format) + ", " +
                            std::to_string(fmt.bits) + " bits)");
  if (fmt.channels == 0) throw ParseError(where + "zero channels");
  if (fmt.sample_rate == 0) throw ParseError(where + "zero sample rate");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (data_size % frame_bytes != 0) throw ParseError(where + "data chunk is not a whole number of frames");
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) throw ParseError(where + "no samples");

  MultichannelWave wave;
  wave.sample_rate_hz = static_cast<int>(fmt.sample_rate);
  wave.samples.resize(fmt.channels, static_cast<Eigen::Index>(frames));
  for (std::size_t k = 0; k < frames; ++k) {
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      const std::uint8_t* p = data + k * frame_bytes + c * bytes_per_sample;
      double v = 0.0;
      if (flt) {
        v = static_cast<double>(std::bit_cast<float>(get_u32(p)));
      } else if (fmt.bits == 16) {
        v = static_cast<std::int16_t>(get_u16(p)) / 32768.0;
      } else {
        std::int32_t s = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      }
      wave.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return wave;
}

void write_wav(const std::filesystem::path& path, const MultichannelWave& wave, WavEncoding encoding) {
  wave.validate();
  const auto channels = static_cast<std::uint16_t>(wave.channels());
  const auto frames = static_cast<std::uint32_t>(wave.length());
  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint32_t data_size = frames * block_align;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, encoding == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(wave.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(wave.sample_rate_hz) * block_align);
  put_u16(out, block_align);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);

  for (std::uint32_t k = 0; k < frames; ++k) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const double v = std::clamp(wave.samples(c, k), -1.0, 1.0);
      if (encoding == WavEncoding::pcm16) {
        const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      } else {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path.string());
}

MultichannelWave stack_channels(const std::vector<MultichannelWave>& waves) {
  if (waves.empty()) throw InvalidArgument("no waves to stack");
  Eigen::Index rows = 0;
  for (const auto& w : waves) {
    w.validate();
    if (w.length() != waves.front().length()) throw InvalidArgument("waves differ in length");
    if (w.sample_rate_hz != waves.front().sample_rate_hz) throw InvalidArgument("waves differ in sample rate");
    rows += w.channels();
  }
  MultichannelWave out;
  out.sample_rate_hz = waves.front().sample_rate_hz;
  out.samples.resize(rows, waves.front().length());
  Eigen::Index r = 0;
  for (const auto& w : waves) {
    out.samples.middleRows(r, w.channels()) = w.samples;
    r += w.channels();
  }
  return out;
}

MultichannelWave channel(const MultichannelWave& wave, Eigen::Index c) {
  if (c < 0 || c >= wave.channels()) throw InvalidArgument("channel index out of range");
  return {wave.samples.row(c), wave.sample_rate_hz};
}

}  // namespace fdbss
