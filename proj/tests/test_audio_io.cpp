#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "core/audio.hpp"
#include "core/errors.hpp"
#include "core/fft.hpp"

using namespace qbh;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

AudioClip sine_clip(double freq_hz, int rate, double seconds, double amp = 0.9) {
    AudioClip clip;
    clip.sample_rate_hz = rate;
    clip.channels.resize(1);
    const size_t n = static_cast<size_t>(seconds * rate);
    for (size_t i = 0; i < n; ++i)
        clip.channels[0].push_back(amp * std::sin(2.0 * M_PI * freq_hz * i / rate));
    return clip;
}

// peak bin of the magnitude spectrum, in Hz at the clip's resolution
double dft_peak_hz(const std::vector<double>& x, int rate) {
    size_t fft_size = 1;
    while (fft_size < x.size()) fft_size <<= 1;
    auto spec = fft_real(x, fft_size);
    size_t best = 0;
    double best_mag = 0.0;
    for (size_t k = 1; k <= fft_size / 2; ++k) {
        if (std::abs(spec[k]) > best_mag) {
            best_mag = std::abs(spec[k]);
            best = k;
        }
    }
    return static_cast<double>(best) * rate / fft_size;
}

double rms(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / std::max<size_t>(1, x.size()));
}

// minimal 16-bit PCM writer, test-side only (the library writes float32)
void write_wav_pcm16(const std::string& path, const std::vector<int16_t>& samples, int rate) {
    std::ofstream out(path, std::ios::binary);
    auto u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
    out.write("RIFF", 4); u32(36 + data_bytes); out.write("WAVE", 4);
    out.write("fmt ", 4); u32(16); u16(1); u16(1); u32(rate); u32(rate * 2); u16(2); u16(16);
    out.write("data", 4); u32(data_bytes);
    out.write(reinterpret_cast<const char*>(samples.data()), data_bytes);
}

}  // namespace

TEST_CASE("read_wav normalizes 16-bit samples") {
    const auto path = temp_path("qbh_pcm16.wav");
    write_wav_pcm16(path, {16384, -32768, 0, 32767}, 8000);
    const auto clip = read_wav(path);
    CHECK(clip.sample_rate_hz == 8000);
    CHECK(clip.num_channels() == 1);
    CHECK(clip.channels[0][0] == doctest::Approx(0.5));
    CHECK(clip.channels[0][1] == doctest::Approx(-1.0));
    CHECK(clip.channels[0][2] == doctest::Approx(0.0));
    std::filesystem::remove(path);
}

TEST_CASE("read_wav rejects malformed and unsupported files") {
    const auto path = temp_path("qbh_bad.wav");
    {
        std::ofstream out(path, std::ios::binary);
        out << "not a wav file at all";
    }
    CHECK_THROWS_AS(read_wav(path), Error);

    // 24-bit PCM header
    {
        std::ofstream out(path, std::ios::binary);
        auto u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
        auto u16 = [&](uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
        out.write("RIFF", 4); u32(36); out.write("WAVE", 4);
        out.write("fmt ", 4); u32(16); u16(1); u16(1); u32(8000); u32(24000); u16(3); u16(24);
        out.write("data", 4); u32(0);
    }
    try {
        read_wav(path);
        FAIL("expected an unsupported-format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Unsupported);
        CHECK(std::string(e.what()).find("24") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("float WAV roundtrip is bit-exact") {
    auto clip = sine_clip(440.0, 8000, 1.0);
    const auto path = temp_path("qbh_roundtrip.wav");
    write_wav_float32(path, clip);
    const auto back = read_wav(path);
    REQUIRE(back.length() == clip.length());
    CHECK(back.sample_rate_hz == 8000);
    for (size_t i = 0; i < clip.length(); ++i)
        CHECK(back.channels[0][i] == static_cast<float>(clip.channels[0][i]));
    CHECK(dft_peak_hz(back.channels[0], 8000) == doctest::Approx(440.0).epsilon(0.01));
    std::filesystem::remove(path);
}

TEST_CASE("downmix averages channels") {
    AudioClip clip;
    clip.sample_rate_hz = 8000;
    clip.channels = {{1.0, 1.0, 0.5}, {-1.0, -1.0, 0.1}};
    const auto mono = downmix_to_mono(clip);
    REQUIRE(mono.num_channels() == 1);
    CHECK(mono.channels[0][0] == doctest::Approx(0.0));
    CHECK(mono.channels[0][1] == doctest::Approx(0.0));
    CHECK(mono.channels[0][2] == doctest::Approx(0.3));

    AudioClip already_mono;
    already_mono.sample_rate_hz = 8000;
    already_mono.channels = {{0.25, 0.5}};
    const auto same = downmix_to_mono(already_mono);
    CHECK(same.channels[0] == already_mono.channels[0]);
}

TEST_CASE("downmix is linear") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    AudioClip x, y;
    x.sample_rate_hz = y.sample_rate_hz = 8000;
    x.channels.assign(2, std::vector<double>(64));
    y.channels.assign(2, std::vector<double>(64));
    for (int c = 0; c < 2; ++c)
        for (int n = 0; n < 64; ++n) {
            x.channels[c][n] = u(rng);
            y.channels[c][n] = u(rng);
        }
    const double a = 0.3, b = -0.7;
    AudioClip combined = x;
    for (int c = 0; c < 2; ++c)
        for (int n = 0; n < 64; ++n)
            combined.channels[c][n] = a * x.channels[c][n] + b * y.channels[c][n];
    const auto mx = downmix_to_mono(x), my = downmix_to_mono(y), mc = downmix_to_mono(combined);
    for (int n = 0; n < 64; ++n)
        CHECK(mc.channels[0][n] ==
              doctest::Approx(a * mx.channels[0][n] + b * my.channels[0][n]).epsilon(1e-12));
}

TEST_CASE("resample passes DC") {
    AudioClip clip;
    clip.sample_rate_hz = 44100;
    clip.channels = {std::vector<double>(44100, 1.0)};
    const auto out = resample(clip, 8000);
    CHECK(out.sample_rate_hz == 8000);
    CHECK(out.length() == 8000);
    for (size_t n = 100; n + 100 < out.length(); ++n)
        CHECK(out.channels[0][n] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("resample preserves a 440 Hz tone's peak bin") {
    const auto clip = sine_clip(440.0, 44100, 1.0);
    const auto out = resample(clip, 8000);
    CHECK(out.length() == 8000);
    CHECK(dft_peak_hz(out.channels[0], 8000) == doctest::Approx(440.0).epsilon(0.01));
}

TEST_CASE("resample removes content above the target Nyquist") {
    const auto clip = sine_clip(5000.0, 44100, 1.0);
    const double in_rms = rms(clip.channels[0]);
    const auto out = resample(clip, 8000);
    CHECK(rms(out.channels[0]) <= 0.01 * in_rms);
}

TEST_CASE("resample properties: zero stays zero, tones keep their bin") {
    AudioClip zero;
    zero.sample_rate_hz = 32000;
    zero.channels = {std::vector<double>(32000, 0.0)};
    const auto z = resample(zero, 8000);
    for (double v : z.channels[0]) CHECK(v == 0.0);

    for (double f : {200.0, 700.0, 1500.0, 2500.0, 3100.0}) {
        const auto out = resample(sine_clip(f, 44100, 1.0), 8000);
        CHECK(dft_peak_hz(out.channels[0], 8000) == doctest::Approx(f).epsilon(0.002));
    }
}

TEST_CASE("resample argument errors") {
    auto clip = sine_clip(440.0, 8000, 0.1);
    CHECK_THROWS_AS(resample(clip, 16000), Error);
    CHECK_THROWS_AS(resample(clip, 0), Error);
}

TEST_CASE("center extraction keeps center content, drops side content") {
    const int rate = 8000;
    const auto v = sine_clip(440.0, rate, 1.0, 0.5);

    SUBCASE("pure center passes through") {
        AudioClip stereo;
        stereo.sample_rate_hz = rate;
        stereo.channels = {v.channels[0], v.channels[0]};
        const auto out = extract_center_vocal(stereo);
        REQUIRE(out.length() == stereo.length());
        double err = 0.0, ref = 0.0;
        for (size_t n = 1024; n + 1024 < out.length(); ++n) {
            const double d = out.channels[0][n] - v.channels[0][n];
            err += d * d;
            ref += v.channels[0][n] * v.channels[0][n];
        }
        CHECK(std::sqrt(err / ref) <= 0.05);
    }

    SUBCASE("anti-phase content cancels") {
        AudioClip stereo;
        stereo.sample_rate_hz = rate;
        stereo.channels.resize(2);
        stereo.channels[0] = v.channels[0];
        for (double s : v.channels[0]) stereo.channels[1].push_back(-s);
        const auto out = extract_center_vocal(stereo);
        CHECK(rms(out.channels[0]) <= 0.01 * rms(stereo.channels[0]));
    }

    SUBCASE("mixed pan: center tone kept, side tone suppressed") {
        const auto s = sine_clip(1200.0, rate, 1.0, 0.3);
        AudioClip stereo;
        stereo.sample_rate_hz = rate;
        stereo.channels.resize(2);
        for (size_t n = 0; n < v.length(); ++n) {
            stereo.channels[0].push_back(v.channels[0][n] + s.channels[0][n]);
            stereo.channels[1].push_back(v.channels[0][n] - s.channels[0][n]);
        }
        const auto out = extract_center_vocal(stereo);

        size_t fft_size = 8192;
        auto spec = fft_real(out.channels[0], fft_size);
        auto in_spec = fft_real(v.channels[0], fft_size);
        auto side_spec = fft_real(s.channels[0], fft_size);
        const size_t v_bin = static_cast<size_t>(std::lround(440.0 * fft_size / rate));
        const size_t s_bin = static_cast<size_t>(std::lround(1200.0 * fft_size / rate));
        CHECK(std::abs(spec[s_bin]) <= 0.1 * std::abs(side_spec[s_bin]));
        const double db = 20.0 * std::log10(std::abs(spec[v_bin]) / std::abs(in_spec[v_bin]));
        CHECK(std::abs(db) <= 1.0);
    }

    SUBCASE("zero input gives zero output") {
        AudioClip stereo;
        stereo.sample_rate_hz = rate;
        stereo.channels.assign(2, std::vector<double>(4000, 0.0));
        const auto out = extract_center_vocal(stereo);
        for (double s : out.channels[0]) CHECK(s == 0.0);
    }

    SUBCASE("mono input is rejected") {
        CHECK_THROWS_AS(extract_center_vocal(v), Error);
    }
}
