// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Checkpoint layout ("TAPE", little-endian):
//   magic[4] version:u32
//   num_layers:u32 hidden:u32 bidirectional:u8 input:u32 output:u32 seed:u64
//   adam_step:u64 alpha:f64 beta1:f64 beta2:f64 epsilon:f64
//   count:u64 params[count]:f64 m[count]:f64 v[count]:f64
//   crc32:u32 over every preceding byte

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "tap/binary_io.hpp"
#include "tap/error.hpp"
#include "tap/estimator.hpp"

namespace tap {
namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

std::uint32_t Crc(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void SaveCheckpoint(const EstimatorParams& params, const AdamState& state,
                    const std::string& path) {
  const EstimatorConfig& cfg = params.config;
  cfg.Validate();
  const std::size_t n = params.values.size();
  if (state.m.size() != n || state.v.size() != n)
    throw DimensionError("optimizer state does not match parameters");
  ByteWriter out;
  out.PutMagic("TAPE");
  out.Put<std::uint32_t>(kCheckpointVersion);
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(cfg.num_layers));
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(cfg.hidden_size));
  out.Put<std::uint8_t>(cfg.bidirectional ? 1 : 0);
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(cfg.input_size));
  out.Put<std::uint32_t>(static_cast<std::uint32_t>(cfg.output_size));
  out.Put<std::uint64_t>(cfg.seed);
  out.Put<std::uint64_t>(state.step);
  out.Put<double>(state.alpha);
  out.Put<double>(state.beta1);
  out.Put<double>(state.beta2);
  out.Put<double>(state.epsilon);
  out.Put<std::uint64_t>(n);
  out.PutDoubles(params.values);
  out.PutDoubles(state.m);
  out.PutDoubles(state.v);
  out.Put<std::uint32_t>(Crc(out.bytes().data(), out.bytes().size()));
  WriteFileBytes(path, out.bytes());
}

Checkpoint LoadCheckpoint(const std::string& path,
                          const std::optional<EstimatorConfig>& expected) {
  const auto bytes = ReadFileBytes(path);
  if (bytes.size() < 8) throw IntegrityError(path + ": file too short");
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (Crc(bytes.data(), body) != stored)
    throw IntegrityError(path + ": checksum mismatch");

  ByteReader in(bytes);
  Checkpoint ck;
  try {
    if (!in.MagicIs("TAPE")) throw IntegrityError(path + ": bad magic");
    const auto version = in.Get<std::uint32_t>();
    if (version != kCheckpointVersion)
      throw IntegrityError(path + ": unsupported checkpoint version " +
                           std::to_string(version));
    EstimatorConfig& cfg = ck.params.config;
    cfg.num_layers = static_cast<int>(in.Get<std::uint32_t>());
    cfg.hidden_size = static_cast<int>(in.Get<std::uint32_t>());
    cfg.bidirectional = in.Get<std::uint8_t>() != 0;
    cfg.input_size = static_cast<int>(in.Get<std::uint32_t>());
    cfg.output_size = static_cast<int>(in.Get<std::uint32_t>());
    cfg.seed = in.Get<std::uint64_t>();
    ck.adam.step = in.Get<std::uint64_t>();
    ck.adam.alpha = in.Get<double>();
    ck.adam.beta1 = in.Get<double>();
    ck.adam.beta2 = in.Get<double>();
    ck.adam.epsilon = in.Get<double>();
    const auto n = in.Get<std::uint64_t>();
    cfg.Validate();
    if (n != ParamLayout(cfg).total())
      throw IntegrityError(path + ": tensor size does not match its config");
    ck.params.values = in.GetDoubles(n);
    ck.adam.m = in.GetDoubles(n);
    ck.adam.v = in.GetDoubles(n);
    if (in.remaining() != 4) throw IntegrityError(path + ": trailing bytes");
  } catch (const FormatError& e) {
    throw IntegrityError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw IntegrityError(path + ": " + e.what());
  }
  if (expected) {
    EstimatorConfig want = *expected;
    want.seed = ck.params.config.seed;  // the seed only matters at init
    if (!(want == ck.params.config))
      throw IntegrityError(path + ": checkpoint config (layers=" +
                           std::to_string(ck.params.config.num_layers) +
                           ", hidden=" +
                           std::to_string(ck.params.config.hidden_size) +
                           ") does not match the requested config (layers=" +
                           std::to_string(expected->num_layers) + ", hidden=" +
                           std::to_string(expected->hidden_size) + ")");
  }
  return ck;
}

}  // namespace tap
