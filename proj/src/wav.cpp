// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tap/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tap/binary_io.hpp"
#include "tap/error.hpp"

namespace tap {

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::string& path,
                    const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write on " + path);
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

Waveform LoadWav(const std::string& path) {
  const std::vector<std::uint8_t> bytes = ReadFileBytes(path);
  ByteReader r(bytes);
  try {
    if (!r.MagicIs("RIFF")) throw FormatError(path + ": missing RIFF tag");
    r.Get<std::uint32_t>();
    if (!r.MagicIs("WAVE")) throw FormatError(path + ": missing WAVE tag");
  } catch (const FormatError&) {
    throw FormatError(path + ": not a RIFF/WAVE file");
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  while (r.remaining() >= 8) {
    char id[4];
    for (char& c : id) c = static_cast<char>(r.Get<std::uint8_t>());
    const std::uint32_t size = r.Get<std::uint32_t>();
    const std::size_t start = r.position();
    if (size > r.remaining()) {
      // Some writers leave the data size unpatched; clamp to what exists.
      if (std::memcmp(id, "data", 4) != 0)
        throw FormatError(path + ": chunk overruns file");
    }
    const std::size_t avail = std::min<std::size_t>(size, r.remaining());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (avail < 16) throw FormatError(path + ": fmt chunk too short");
      fmt.format = r.Get<std::uint16_t>();
      fmt.channels = r.Get<std::uint16_t>();
      fmt.sample_rate = r.Get<std::uint32_t>();
      r.Get<std::uint32_t>();  // byte rate
      r.Get<std::uint16_t>();  // block align
      fmt.bits = r.Get<std::uint16_t>();
      if (fmt.format == kFormatExtensible) {
        if (avail < 40) throw FormatError(path + ": extensible fmt too short");
        r.Get<std::uint16_t>();  // cb size
        r.Get<std::uint16_t>();  // valid bits
        r.Get<std::uint32_t>();  // channel mask
        fmt.format = r.Get<std::uint16_t>();  // first two bytes of sub-GUID
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + start;
      data_size = avail;
    }
    // Skip to the next chunk (chunks are word aligned).
    std::size_t next = start + avail + (avail & 1u);
    if (next > r.position()) r.Skip(std::min(next - r.position(), r.remaining()));
    if (data != nullptr && have_fmt) break;
  }
  if (!have_fmt) throw FormatError(path + ": missing fmt chunk");
  if (data == nullptr) throw FormatError(path + ": missing data chunk");
  if (fmt.sample_rate == 0) throw FormatError(path + ": zero sample rate");
  if (fmt.channels != 1 && fmt.channels != 2)
    throw UnsupportedError(path + ": only mono or stereo is supported");
  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.format == kFormatFloat && fmt.bits == 32;
  if (!pcm16 && !float32)
    throw UnsupportedError(path + ": encoding must be PCM-16 or float-32");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = data_size / frame_bytes;
  Waveform w;
  w.sample_rate = static_cast<int>(fmt.sample_rate);
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c) {
      const std::uint8_t* p = data + i * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        std::int16_t v;
        std::memcpy(&v, p, 2);
        acc += v / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, 4);
        acc += v;
      }
    }
    w.samples[i] = fmt.channels == 2 ? acc * 0.5 : acc;
  }
  return w;
}

namespace {

void PutHeader(ByteWriter& out, std::uint16_t format, std::uint16_t bits,
               std::uint32_t rate, std::uint32_t data_bytes) {
  const std::uint16_t block = bits / 8;
  out.PutMagic("RIFF");
  out.Put<std::uint32_t>(36 + data_bytes);
  out.PutMagic("WAVE");
  out.PutMagic("fmt ");
  out.Put<std::uint32_t>(16);
  out.Put<std::uint16_t>(format);
  out.Put<std::uint16_t>(1);
  out.Put<std::uint32_t>(rate);
  out.Put<std::uint32_t>(rate * block);
  out.Put<std::uint16_t>(block);
  out.Put<std::uint16_t>(bits);
  out.PutMagic("data");
  out.Put<std::uint32_t>(data_bytes);
}

}  // namespace

void SaveWav(const Waveform& w, const std::string& path) {
  ByteWriter out;
  PutHeader(out, kFormatFloat, 32, static_cast<std::uint32_t>(w.sample_rate),
            static_cast<std::uint32_t>(w.size() * 4));
  for (double s : w.samples) out.Put<float>(static_cast<float>(s));
  WriteFileBytes(path, out.bytes());
}

void SaveWavPcm16(const Waveform& w, const std::string& path) {
  ByteWriter out;
  PutHeader(out, kFormatPcm, 16, static_cast<std::uint32_t>(w.sample_rate),
            static_cast<std::uint32_t>(w.size() * 2));
  for (double s : w.samples) {
    const double v = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    out.Put<std::int16_t>(static_cast<std::int16_t>(v));
  }
  WriteFileBytes(path, out.bytes());
}

}  // namespace tap
