#pragma once

#include <string>
#include <vector>

namespace qbh {

// PCM audio, samples normalized to [-1, 1]. One or two channels of equal length.
struct AudioClip {
    std::vector<std::vector<double>> channels;
    int sample_rate_hz = 0;

    size_t num_channels() const { return channels.size(); }
    size_t length() const { return channels.empty() ? 0 : channels[0].size(); }
    bool is_mono() const { return channels.size() == 1; }
};

// Reads a RIFF/WAVE file. PCM 16-bit int and IEEE float32, 1 or 2 channels.
AudioClip read_wav(const std::string& path);

// Writes mono or stereo float32 WAV. Used for test roundtrips and the
// synthetic corpus; 16-bit write is intentionally absent.
void write_wav_float32(const std::string& path, const AudioClip& clip);

// (L+R)/2 for stereo, pass-through for mono.
AudioClip downmix_to_mono(const AudioClip& clip);

// Anti-aliased decimation of a mono clip. Windowed-sinc FIR low-pass
// (Hamming, 127 taps, cutoff 0.45 * target rate) then rational-ratio
// sample selection with linear interpolation. Upsampling is rejected.
AudioClip resample(const AudioClip& clip, int target_rate_hz);

// Estimates the center-panned content of a stereo mix. Per STFT bin
// (frame 1024, hop 256, Hann): V = max(|M| - |S|, 0) * phase(M) with
// M = (L+R)/2, S = (L-R)/2. Output is mono, same length as the input.
AudioClip extract_center_vocal(const AudioClip& clip);

}  // namespace qbh
