#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/audio.hpp"

namespace qbh {

// Seeded synthetic corpus: each song is a random pentatonic melody of
// harmonic tones with vibrato; queries are re-renderings of the same
// melody with tempo jitter and additive noise.
struct SynthParams {
    int num_songs = 50;
    double seconds = 2.0;
    int sample_rate_hz = 8000;
    double tempo_jitter_pct = 10.0;  // query tempo drawn from +/- this range
    double noise_snr_db = 20.0;      // query additive-noise SNR; <= 0 disables
    uint64_t seed = 1;
};

struct SynthSong {
    std::string song_id;
    std::string title;
    AudioClip audio;
    AudioClip query_audio;  // perturbed rendering of the same melody
};

std::vector<SynthSong> generate_synth_corpus(const SynthParams& params);

// Writes songs/, queries/, ingest.csv (path,id,title) and
// queries.csv (path,target_id) under out_dir.
void write_synth_corpus(const SynthParams& params, const std::string& out_dir);

}  // namespace qbh
