#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "fdbss/error.hpp"
#include "fdbss/wave.hpp"
#include "support.hpp"

using namespace fdbss;

namespace {

void put_u32(std::vector<char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::vector<char>& b, std::uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>(v >> 8));
}

// Minimal hand-built RIFF file, independent of write_wav.
std::vector<char> raw_wav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate, std::uint16_t bits,
                          const std::vector<char>& data) {
  std::vector<char> b;
  const char riff[] = "RIFF", wave[] = "WAVE", fmt[] = "fmt ", dat[] = "data";
  b.insert(b.end(), riff, riff + 4);
  put_u32(b, static_cast<std::uint32_t>(36 + data.size()));
  b.insert(b.end(), wave, wave + 4);
  b.insert(b.end(), fmt, fmt + 4);
  put_u32(b, 16);
  put_u16(b, format);
  put_u16(b, channels);
  put_u32(b, rate);
  put_u32(b, rate * channels * bits / 8);
  put_u16(b, static_cast<std::uint16_t>(channels * bits / 8));
  put_u16(b, bits);
  b.insert(b.end(), dat, dat + 4);
  put_u32(b, static_cast<std::uint32_t>(data.size()));
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

void dump(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

MultichannelWave random_wave(std::uint64_t seed, Eigen::Index m, Eigen::Index k) {
  Rng rng(seed);
  MultichannelWave w;
  w.samples.resize(m, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < m; ++i) w.samples(i, j) = rng.uniform(-1.0, 1.0);
  return w;
}

}  // namespace

TEST_CASE("float32 round trip is bit exact") {
  const auto dir = testing::temp_dir("wave_f32");
  MultichannelWave w = random_wave(1, 2, 999);
  w.samples = w.samples.cast<float>().cast<double>();
  write_wav(dir / "a.wav", w, WavEncoding::float32);
  const MultichannelWave r = read_wav(dir / "a.wav");
  CHECK(r.channels() == 2);
  CHECK(r.sample_rate_hz == 16000);
  CHECK(r.samples == w.samples);
}

TEST_CASE("pcm16 round trip within one quantization step") {
  const auto dir = testing::temp_dir("wave_pcm16");
  MultichannelWave w = random_wave(2, 3, 4000);
  w.sample_rate_hz = 44100;
  write_wav(dir / "a.wav", w, WavEncoding::pcm16);
  const MultichannelWave r = read_wav(dir / "a.wav");
  CHECK(r.channels() == 3);
  CHECK(r.sample_rate_hz == 44100);
  CHECK((r.samples - w.samples).cwiseAbs().maxCoeff() <= 1.0 / 32768.0);
}

TEST_CASE("silence reads back as zeros") {
  const auto dir = testing::temp_dir("wave_zero");
  MultichannelWave w;
  w.samples = Eigen::MatrixXd::Zero(2, 100);
  for (auto enc : {WavEncoding::pcm16, WavEncoding::float32}) {
    write_wav(dir / "z.wav", w, enc);
    CHECK(read_wav(dir / "z.wav").samples.isZero(0));
  }
}

TEST_CASE("clipping before quantization") {
  const auto dir = testing::temp_dir("wave_clip");
  MultichannelWave w;
  w.samples.resize(1, 3);
  w.samples << 2.0, -3.0, 0.5;
  write_wav(dir / "c.wav", w, WavEncoding::float32);
  const auto r = read_wav(dir / "c.wav");
  CHECK(r.samples(0, 0) == 1.0);
  CHECK(r.samples(0, 1) == -1.0);
  CHECK(r.samples(0, 2) == 0.5);
}

TEST_CASE("pcm16 extreme maps to -1 exactly") {
  const auto dir = testing::temp_dir("wave_min");
  std::vector<char> data;
  put_u16(data, 0x8000);
  put_u16(data, 0x7fff);
  put_u16(data, 0);
  put_u16(data, 0x4000);
  dump(dir / "m.wav", raw_wav(1, 2, 16000, 16, data));
  const auto r = read_wav(dir / "m.wav");
  CHECK(r.channels() == 2);
  CHECK(r.length() == 2);
  CHECK(r.samples(0, 0) == -1.0);
  CHECK(r.samples(1, 0) == 32767.0 / 32768.0);
  CHECK(r.samples(0, 1) == 0.0);
  CHECK(r.samples(1, 1) == 0.5);
}

TEST_CASE("pcm24 decoding") {
  const auto dir = testing::temp_dir("wave_24");
  std::vector<char> data = {0, 0, static_cast<char>(0x80),  // -2^23
                            static_cast<char>(0xff), static_cast<char>(0xff), static_cast<char>(0xff),  // -1
                            0, 0, 0x40};  // 2^22
  dump(dir / "p.wav", raw_wav(1, 1, 8000, 24, data));
  const auto r = read_wav(dir / "p.wav");
  CHECK(r.sample_rate_hz == 8000);
  REQUIRE(r.length() == 3);
  CHECK(r.samples(0, 0) == -1.0);
  CHECK(r.samples(0, 1) == -1.0 / 8388608.0);
  CHECK(r.samples(0, 2) == 0.5);
}

TEST_CASE("unsupported and malformed files") {
  const auto dir = testing::temp_dir("wave_bad");
  dump(dir / "pcm8.wav", raw_wav(1, 1, 16000, 8, {1, 2, 3}));
  CHECK_THROWS_AS(read_wav(dir / "pcm8.wav"), UnsupportedFormat);
  dump(dir / "alaw.wav", raw_wav(6, 1, 16000, 8, {1, 2, 3}));
  CHECK_THROWS_AS(read_wav(dir / "alaw.wav"), UnsupportedFormat);
  dump(dir / "f64.wav", raw_wav(3, 1, 16000, 64, std::vector<char>(16, 0)));
  CHECK_THROWS_AS(read_wav(dir / "f64.wav"), UnsupportedFormat);

  auto bytes = raw_wav(1, 1, 16000, 16, std::vector<char>(200, 0));
  bytes.resize(bytes.size() - 100);
  dump(dir / "trunc.wav", bytes);
  CHECK_THROWS_AS(read_wav(dir / "trunc.wav"), ParseError);
  dump(dir / "header.wav", std::vector<char>(bytes.begin(), bytes.begin() + 20));
  CHECK_THROWS_AS(read_wav(dir / "header.wav"), ParseError);
  dump(dir / "text.wav", std::vector<char>(64, 'x'));
  CHECK_THROWS_AS(read_wav(dir / "text.wav"), ParseError);
  CHECK_THROWS_AS(read_wav(dir / "missing.wav"), IoError);
}

TEST_CASE("write failure names the path") {
  MultichannelWave w;
  w.samples = Eigen::MatrixXd::Zero(1, 4);
  try {
    write_wav("/nonexistent_dir/x.wav", w, WavEncoding::pcm16);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent_dir/x.wav") != std::string::npos);
  }
}

TEST_CASE("wave validation") {
  MultichannelWave w;
  CHECK_THROWS_AS(w.validate(), InvalidArgument);
  w.samples = Eigen::MatrixXd::Zero(2, 4);
  CHECK_NOTHROW(w.validate());
  w.samples(1, 2) = std::nan("");
  CHECK_THROWS_AS(w.validate(), InvalidArgument);
  w.samples(1, 2) = 0;
  w.sample_rate_hz = 0;
  CHECK_THROWS_AS(w.validate(), InvalidArgument);
}

TEST_CASE("channel order survives stacking and splitting") {
  const MultichannelWave a = random_wave(5, 1, 50), b = random_wave(6, 2, 50);
  const MultichannelWave s = stack_channels({a, b});
  REQUIRE(s.channels() == 3);
  CHECK(channel(s, 0).samples == a.samples);
  CHECK(channel(s, 1).samples == b.samples.row(0));
  CHECK(channel(s, 2).samples == b.samples.row(1));
  MultichannelWave c = random_wave(7, 1, 49);
  CHECK_THROWS_AS(stack_channels({a, c}), InvalidArgument);
  c = random_wave(7, 1, 50);
  c.sample_rate_hz = 8000;
  CHECK_THROWS_AS(stack_channels({a, c}), InvalidArgument);
}
