#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/features.hpp"

namespace qbh {

constexpr int kStoreFormatVersion = 1;

struct SongRecord {
    std::string song_id;
    std::string title;
    uint64_t source_hash = 0;  // FNV-1a over the raw WAV bytes
    std::map<FeatureKind, FeatureSequence> features;
};

struct FeatureStore {
    std::vector<SongRecord> records;
    FrameConfig config;
    int format_version = kStoreFormatVersion;

    const SongRecord* find(const std::string& song_id) const;
    void add(SongRecord record);  // rejects duplicate song_id
};

uint64_t fnv1a64(const void* data, size_t len);

// Full ingestion pipeline: read -> (stereo) extract_center_vocal ->
// downmix -> resample -> extract MFCC/LPC/LPCC.
SongRecord ingest_song(const std::string& path, const std::string& song_id,
                       const std::string& title, const FrameConfig& config);

// Runs the same pre-processing as ingest_song and returns the mono clip
// at the configured rate. Used for query audio.
AudioClip preprocess_audio(const std::string& path, const FrameConfig& config);

// Store directory layout: manifest.json plus one little-endian float32
// matrix file per (song, feature kind).
void save_store(const FeatureStore& store, const std::string& directory);
FeatureStore load_store(const std::string& directory);

}  // namespace qbh
