// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TAP_WAV_HPP_
#define TAP_WAV_HPP_

#include <string>

#include "tap/signal.hpp"

namespace tap {

// Reads RIFF/WAVE with PCM-16 or IEEE float-32 samples, 1 or 2 channels.
// Stereo is averaged to mono; PCM-16 is scaled by 1/32768.
Waveform LoadWav(const std::string& path);

// Writes mono IEEE float-32.
void SaveWav(const Waveform& w, const std::string& path);

// Writes mono PCM-16 (round-to-nearest, clipped). Used for fixtures.
void SaveWavPcm16(const Waveform& w, const std::string& path);

}  // namespace tap

#endif  // TAP_WAV_HPP_
