#include "core/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "core/errors.hpp"

namespace fs = std::filesystem;

namespace qbh {
namespace {

// C major pentatonic across two octaves, comfortably inside the 8 kHz band.
const double kScaleHz[] = {220.0, 246.9, 277.2, 329.6, 370.0,
                           440.0, 493.9, 554.4, 659.3, 740.0};
constexpr int kScaleSize = 10;

struct Note {
    double freq_hz;
    double dur_s;
};

// per-song spectral envelope over the first few harmonics
constexpr int kHarmonics = 3;
using Timbre = std::array<double, kHarmonics>;

Timbre random_timbre(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.3, 1.0);
    Timbre t;
    t[0] = 1.0;
    for (int h = 1; h < kHarmonics; ++h) t[h] = amp(rng) / (h + 1);
    return t;
}

std::vector<Note> random_melody(std::mt19937_64& rng, double seconds) {
    std::uniform_int_distribution<int> step(-2, 2);
    std::uniform_real_distribution<double> dur(0.18, 0.32);
    std::vector<Note> melody;
    int degree = std::uniform_int_distribution<int>(2, kScaleSize - 3)(rng);
    double total = 0.0;
    while (total < seconds) {
        degree = std::clamp(degree + step(rng), 0, kScaleSize - 1);
        const double d = dur(rng);
        melody.push_back({kScaleHz[degree], d});
        total += d;
    }
    return melody;
}

AudioClip render(const std::vector<Note>& melody, const Timbre& timbre, int rate,
                 double tempo_factor, double vibrato_hz, double vibrato_depth,
                 uint64_t breath_seed) {
    AudioClip clip;
    clip.sample_rate_hz = rate;
    clip.channels.resize(1);
    auto& x = clip.channels[0];

    // quiet broadband breath component; keeps the tone from being a pure
    // line spectrum, which downstream spectral models handle badly
    std::mt19937_64 breath_rng(breath_seed);
    std::normal_distribution<double> breath(0.0, 0.04);

    std::array<double, kHarmonics> phase{};
    double t_global = 0.0;
    const double dt = 1.0 / rate;
    for (const auto& note : melody) {
        const int n_samples = static_cast<int>(std::lround(note.dur_s * tempo_factor * rate));
        const int ramp = std::min(n_samples / 4, static_cast<int>(0.010 * rate));
        for (int n = 0; n < n_samples; ++n) {
            const double vib = 1.0 + vibrato_depth * std::sin(2.0 * M_PI * vibrato_hz * t_global);
            double v = breath(breath_rng);
            for (int h = 0; h < kHarmonics; ++h) {
                phase[h] += 2.0 * M_PI * note.freq_hz * (h + 1) * vib * dt;
                v += timbre[h] * std::sin(phase[h]);
            }
            double env = 1.0;
            if (n < ramp) env = 0.5 - 0.5 * std::cos(M_PI * n / ramp);
            else if (n >= n_samples - ramp)
                env = 0.5 - 0.5 * std::cos(M_PI * (n_samples - 1 - n) / ramp);
            x.push_back(0.3 * env * v);
            t_global += dt;
        }
    }
    return clip;
}

void add_noise(AudioClip& clip, double snr_db, std::mt19937_64& rng) {
    auto& x = clip.channels[0];
    double power = 0.0;
    for (double v : x) power += v * v;
    power /= std::max<size_t>(1, x.size());
    const double noise_power = power / std::pow(10.0, snr_db / 10.0);
    std::normal_distribution<double> noise(0.0, std::sqrt(noise_power));
    for (double& v : x) v = std::clamp(v + noise(rng), -1.0, 1.0);
}

}  // namespace

std::vector<SynthSong> generate_synth_corpus(const SynthParams& params) {
    if (params.num_songs < 1) throw argument_error("need at least one song");
    if (params.seconds <= 0.0) throw argument_error("song duration must be positive");

    std::vector<SynthSong> songs;
    songs.reserve(params.num_songs);
    for (int i = 0; i < params.num_songs; ++i) {
        std::mt19937_64 rng(params.seed * 0x9e3779b97f4a7c15ULL + i);
        auto melody = random_melody(rng, params.seconds);
        // per-song register: transpose the whole melody so songs occupy
        // distinct pitch ranges (3rd harmonic stays under the 3.6 kHz band)
        const double transpose =
            std::exp(std::uniform_real_distribution<double>(std::log(0.7), std::log(1.4))(rng));
        for (auto& note : melody) note.freq_hz *= transpose;
        const auto timbre = random_timbre(rng);
        std::uniform_real_distribution<double> vib_hz(5.0, 6.0);
        const double vibrato_hz = vib_hz(rng);

        const uint64_t breath_seed = rng();

        SynthSong song;
        char id[16];
        std::snprintf(id, sizeof(id), "song%04d", i);
        song.song_id = id;
        song.title = std::string("Synthetic melody ") + std::to_string(i);
        song.audio =
            render(melody, timbre, params.sample_rate_hz, 1.0, vibrato_hz, 0.01, breath_seed);

        double tempo = 1.0;
        if (params.tempo_jitter_pct > 0.0) {
            std::uniform_real_distribution<double> jitter(1.0 - params.tempo_jitter_pct / 100.0,
                                                          1.0 + params.tempo_jitter_pct / 100.0);
            tempo = jitter(rng);
        }
        song.query_audio =
            render(melody, timbre, params.sample_rate_hz, tempo, vibrato_hz, 0.01, breath_seed);
        if (params.noise_snr_db > 0.0) add_noise(song.query_audio, params.noise_snr_db, rng);
        songs.push_back(std::move(song));
    }
    return songs;
}

void write_synth_corpus(const SynthParams& params, const std::string& out_dir) {
    const auto songs = generate_synth_corpus(params);
    fs::create_directories(fs::path(out_dir) / "songs");
    fs::create_directories(fs::path(out_dir) / "queries");

    std::ofstream ingest(fs::path(out_dir) / "ingest.csv");
    std::ofstream queries(fs::path(out_dir) / "queries.csv");
    if (!ingest || !queries) throw format_error("cannot write corpus manifests in " + out_dir);
    for (const auto& song : songs) {
        const fs::path wav = fs::path(out_dir) / "songs" / (song.song_id + ".wav");
        const fs::path qwav = fs::path(out_dir) / "queries" / (song.song_id + ".wav");
        write_wav_float32(wav.string(), song.audio);
        write_wav_float32(qwav.string(), song.query_audio);
        ingest << wav.string() << "," << song.song_id << "," << song.title << "\n";
        queries << qwav.string() << "," << song.song_id << "\n";
    }
}

}  // namespace qbh
