#include "core/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/errors.hpp"
#include "core/fft.hpp"

namespace qbh {
namespace {

void check_clip(const AudioClip& clip) {
    if (clip.channels.empty() || clip.channels.size() > 2)
        throw argument_error("clip must have 1 or 2 channels");
    for (const auto& ch : clip.channels)
        if (ch.size() != clip.channels[0].size())
            throw argument_error("channel lengths differ");
}

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

AudioClip read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open WAV file: " + path);

    char tag[4];
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "RIFF", 4) != 0)
        throw format_error(path + ": missing RIFF header");
    read_u32(in);  // riff size, unused
    in.read(tag, 4);
    if (!in || std::memcmp(tag, "WAVE", 4) != 0)
        throw format_error(path + ": not a WAVE file");

    uint16_t format = 0, num_channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    bool have_fmt = false;
    std::vector<char> data;
    bool have_data = false;

    while (in.read(tag, 4)) {
        uint32_t chunk_size = read_u32(in);
        if (!in) throw format_error(path + ": truncated chunk header");
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw format_error(path + ": fmt chunk too short");
            format = read_u16(in);
            num_channels = read_u16(in);
            sample_rate = read_u32(in);
            read_u32(in);  // byte rate
            read_u16(in);  // block align
            bits = read_u16(in);
            if (format == kFormatExtensible && chunk_size >= 40) {
                read_u16(in);  // cbSize
                read_u16(in);  // valid bits
                read_u32(in);  // channel mask
                format = read_u16(in);  // first two bytes of the subformat GUID
                in.ignore(14);
                in.ignore(chunk_size - 40);
            } else {
                in.ignore(chunk_size - 16);
            }
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            data.resize(chunk_size);
            in.read(data.data(), chunk_size);
            if (static_cast<uint32_t>(in.gcount()) != chunk_size)
                throw format_error(path + ": data chunk truncated");
            have_data = true;
        } else {
            in.ignore(chunk_size + (chunk_size & 1));  // chunks are word-aligned
        }
    }

    if (!have_fmt) throw format_error(path + ": missing fmt chunk");
    if (!have_data) throw format_error(path + ": missing data chunk");
    if (num_channels < 1 || num_channels > 2)
        throw unsupported_error(path + ": unsupported channel count " + std::to_string(num_channels));
    if (sample_rate == 0) throw format_error(path + ": zero sample rate");

    const bool pcm16 = (format == kFormatPcm && bits == 16);
    const bool float32 = (format == kFormatFloat && bits == 32);
    if (!pcm16 && !float32) {
        std::string enc = "format tag " + std::to_string(format) + ", " + std::to_string(bits) + "-bit";
        if (format == kFormatPcm) enc = std::to_string(bits) + "-bit PCM";
        if (format == 2) enc = "ADPCM";
        throw unsupported_error(path + ": unsupported encoding (" + enc + ")");
    }

    const size_t bytes_per_sample = pcm16 ? 2 : 4;
    const size_t frame_bytes = bytes_per_sample * num_channels;
    const size_t num_frames = data.size() / frame_bytes;

    AudioClip clip;
    clip.sample_rate_hz = static_cast<int>(sample_rate);
    clip.channels.assign(num_channels, std::vector<double>(num_frames));
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data());
    for (size_t n = 0; n < num_frames; ++n) {
        for (size_t c = 0; c < num_channels; ++c) {
            const unsigned char* s = p + n * frame_bytes + c * bytes_per_sample;
            double v;
            if (pcm16) {
                int16_t raw = static_cast<int16_t>(s[0] | (s[1] << 8));
                v = static_cast<double>(raw) / 32768.0;
            } else {
                float f;
                std::memcpy(&f, s, 4);
                v = static_cast<double>(f);
            }
            if (!std::isfinite(v)) throw format_error(path + ": non-finite sample");
            clip.channels[c][n] = v;
        }
    }
    return clip;
}

void write_wav_float32(const std::string& path, const AudioClip& clip) {
    check_clip(clip);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw format_error("cannot create WAV file: " + path);

    const uint16_t channels = static_cast<uint16_t>(clip.num_channels());
    const uint32_t num_frames = static_cast<uint32_t>(clip.length());
    const uint32_t data_bytes = num_frames * channels * 4;

    out.write("RIFF", 4);
    write_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, kFormatFloat);
    write_u16(out, channels);
    write_u32(out, static_cast<uint32_t>(clip.sample_rate_hz));
    write_u32(out, static_cast<uint32_t>(clip.sample_rate_hz) * channels * 4);
    write_u16(out, static_cast<uint16_t>(channels * 4));
    write_u16(out, 32);
    out.write("data", 4);
    write_u32(out, data_bytes);
    for (uint32_t n = 0; n < num_frames; ++n) {
        for (uint16_t c = 0; c < channels; ++c) {
            float f = static_cast<float>(clip.channels[c][n]);
            char b[4];
            std::memcpy(b, &f, 4);
            out.write(b, 4);
        }
    }
    if (!out) throw format_error("write failed: " + path);
}

AudioClip downmix_to_mono(const AudioClip& clip) {
    check_clip(clip);
    if (clip.is_mono()) return clip;
    AudioClip out;
    out.sample_rate_hz = clip.sample_rate_hz;
    out.channels.resize(1);
    auto& m = out.channels[0];
    const auto& l = clip.channels[0];
    const auto& r = clip.channels[1];
    m.resize(l.size());
    for (size_t n = 0; n < l.size(); ++n) m[n] = 0.5 * (l[n] + r[n]);
    return out;
}

namespace {

// Linear-phase low-pass used before decimation.
std::vector<double> hamming_sinc_lowpass(int taps, double cutoff_hz, double rate_hz) {
    std::vector<double> h(taps);
    const double fc = cutoff_hz / rate_hz;  // cycles per sample
    const int mid = (taps - 1) / 2;
    double sum = 0.0;
    for (int n = 0; n < taps; ++n) {
        const int m = n - mid;
        double s = (m == 0) ? 2.0 * fc
                            : std::sin(2.0 * M_PI * fc * m) / (M_PI * m);
        double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (taps - 1));
        h[n] = s * w;
        sum += h[n];
    }
    for (auto& v : h) v /= sum;  // unity DC gain
    return h;
}

}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate_hz) {
    check_clip(clip);
    if (!clip.is_mono()) throw argument_error("resample expects a mono clip");
    if (target_rate_hz <= 0) throw argument_error("target rate must be positive");
    if (target_rate_hz > clip.sample_rate_hz)
        throw unsupported_error("upsampling not supported (" +
                                std::to_string(clip.sample_rate_hz) + " -> " +
                                std::to_string(target_rate_hz) + " Hz)");
    if (target_rate_hz == clip.sample_rate_hz) return clip;

    const auto& x = clip.channels[0];
    const size_t len = x.size();
    AudioClip out;
    out.sample_rate_hz = target_rate_hz;
    out.channels.resize(1);
    if (len == 0) return out;

    const int taps = 127;
    const auto h = hamming_sinc_lowpass(taps, 0.45 * target_rate_hz,
                                        static_cast<double>(clip.sample_rate_hz));
    const int mid = (taps - 1) / 2;

    // Filtered signal with edge clamping; keeps DC flat at the boundaries.
    std::vector<double> y(len);
    for (size_t n = 0; n < len; ++n) {
        double acc = 0.0;
        for (int k = 0; k < taps; ++k) {
            long idx = static_cast<long>(n) + (k - mid);
            if (idx < 0) idx = 0;
            if (idx >= static_cast<long>(len)) idx = static_cast<long>(len) - 1;
            acc += h[k] * x[static_cast<size_t>(idx)];
        }
        y[n] = acc;
    }

    const size_t out_len = static_cast<size_t>(std::llround(
        static_cast<double>(len) * target_rate_hz / clip.sample_rate_hz));
    auto& z = out.channels[0];
    z.resize(out_len);
    const double step = static_cast<double>(clip.sample_rate_hz) / target_rate_hz;
    for (size_t n = 0; n < out_len; ++n) {
        const double pos = n * step;
        const size_t i = std::min(static_cast<size_t>(pos), len - 1);
        const size_t j = std::min(i + 1, len - 1);
        const double frac = pos - static_cast<double>(i);
        z[n] = y[i] + frac * (y[j] - y[i]);
    }
    return out;
}

AudioClip extract_center_vocal(const AudioClip& clip) {
    check_clip(clip);
    if (clip.num_channels() != 2)
        throw argument_error("center extraction needs a stereo clip; skip separation for mono input");

    constexpr size_t kFrame = 1024;
    constexpr size_t kHop = 256;
    const size_t len = clip.length();

    AudioClip out;
    out.sample_rate_hz = clip.sample_rate_hz;
    out.channels.resize(1);
    auto& v = out.channels[0];
    v.assign(len, 0.0);
    if (len == 0) return out;

    std::vector<double> window(kFrame);
    for (size_t n = 0; n < kFrame; ++n)
        window[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / kFrame);  // periodic Hann

    const auto& l = clip.channels[0];
    const auto& r = clip.channels[1];
    std::vector<double> wsum(len, 0.0);
    std::vector<std::complex<double>> mid(kFrame), side(kFrame);

    for (size_t start = 0; start < len; start += kHop) {
        for (size_t n = 0; n < kFrame; ++n) {
            const size_t t = start + n;
            const double lv = t < len ? l[t] : 0.0;
            const double rv = t < len ? r[t] : 0.0;
            mid[n] = {window[n] * 0.5 * (lv + rv), 0.0};
            side[n] = {window[n] * 0.5 * (lv - rv), 0.0};
        }
        fft_inplace(mid, false);
        fft_inplace(side, false);
        for (size_t k = 0; k < kFrame; ++k) {
            const double mag_m = std::abs(mid[k]);
            const double mag_s = std::abs(side[k]);
            const double mag_v = std::max(mag_m - mag_s, 0.0);
            mid[k] = (mag_m > 0.0) ? mid[k] * (mag_v / mag_m) : std::complex<double>(0.0, 0.0);
        }
        fft_inplace(mid, true);
        for (size_t n = 0; n < kFrame; ++n) {
            const size_t t = start + n;
            if (t >= len) break;
            v[t] += mid[n].real() * window[n];
            wsum[t] += window[n] * window[n];
        }
    }

    for (size_t t = 0; t < len; ++t)
        if (wsum[t] > 1e-8) v[t] /= wsum[t];
    return out;
}

}  // namespace qbh
