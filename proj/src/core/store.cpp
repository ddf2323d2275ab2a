#include "core/store.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qbh {

const SongRecord* FeatureStore::find(const std::string& song_id) const {
    for (const auto& r : records)
        if (r.song_id == song_id) return &r;
    return nullptr;
}

void FeatureStore::add(SongRecord record) {
    if (record.song_id.empty()) throw argument_error("song_id must be non-empty");
    if (find(record.song_id))
        throw data_error("duplicate song_id: " + record.song_id);
    records.push_back(std::move(record));
}

uint64_t fnv1a64(const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open file: " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a64(bytes.data(), bytes.size());
}

json config_to_json(const FrameConfig& c) {
    return json{{"frame_len", c.frame_len},
                {"hop", c.hop},
                {"pre_emphasis_alpha", c.pre_emphasis_alpha},
                {"sample_rate_hz", c.sample_rate_hz},
                {"num_mel_filters", c.num_mel_filters},
                {"fft_size", c.fft_size},
                {"num_ceps", c.num_ceps},
                {"lpc_order", c.lpc_order},
                {"lpc_retained", c.lpc_retained},
                {"lpcc_count", c.lpcc_count},
                {"lpcc_retained", c.lpcc_retained},
                {"extended_mfcc", c.extended_mfcc}};
}

FrameConfig config_from_json(const json& j) {
    FrameConfig c;
    c.frame_len = j.at("frame_len").get<int>();
    c.hop = j.at("hop").get<int>();
    c.pre_emphasis_alpha = j.at("pre_emphasis_alpha").get<double>();
    c.sample_rate_hz = j.at("sample_rate_hz").get<int>();
    c.num_mel_filters = j.at("num_mel_filters").get<int>();
    c.fft_size = j.at("fft_size").get<int>();
    c.num_ceps = j.at("num_ceps").get<int>();
    c.lpc_order = j.at("lpc_order").get<int>();
    c.lpc_retained = j.at("lpc_retained").get<int>();
    c.lpcc_count = j.at("lpcc_count").get<int>();
    c.lpcc_retained = j.at("lpcc_retained").get<int>();
    c.extended_mfcc = j.at("extended_mfcc").get<bool>();
    return c;
}

std::string matrix_filename(const std::string& song_id, FeatureKind kind) {
    return song_id + "." + feature_kind_name(kind) + ".f32";
}

}  // namespace

SongRecord ingest_song(const std::string& path, const std::string& song_id,
                       const std::string& title, const FrameConfig& config) {
    config.validate();
    SongRecord record;
    record.song_id = song_id;
    record.title = title;
    record.source_hash = hash_file(path);

    const AudioClip mono = preprocess_audio(path, config);
    for (FeatureKind kind : {FeatureKind::MFCC, FeatureKind::LPC, FeatureKind::LPCC})
        record.features[kind] = extract_features(mono, kind, config);
    return record;
}

AudioClip preprocess_audio(const std::string& path, const FrameConfig& config) {
    AudioClip clip = read_wav(path);
    if (clip.num_channels() == 2) clip = extract_center_vocal(clip);
    clip = downmix_to_mono(clip);
    if (clip.sample_rate_hz != config.sample_rate_hz)
        clip = resample(clip, config.sample_rate_hz);
    return clip;
}

void save_store(const FeatureStore& store, const std::string& directory) {
    fs::create_directories(directory);
    json manifest;
    manifest["format_version"] = store.format_version;
    manifest["config"] = config_to_json(store.config);
    json songs = json::array();
    for (const auto& record : store.records) {
        json entry;
        entry["song_id"] = record.song_id;
        entry["title"] = record.title;
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(record.source_hash));
        entry["source_hash"] = hex;
        json feats;
        for (const auto& [kind, seq] : record.features) {
            const std::string fname = matrix_filename(record.song_id, kind);
            const size_t bytes = seq.matrix.size() * sizeof(float);
            feats[feature_kind_name(kind)] = {{"file", fname},
                                              {"frames", seq.frames},
                                              {"dim", seq.dim},
                                              {"byte_length", bytes}};
            std::ofstream out(fs::path(directory) / fname, std::ios::binary);
            if (!out) throw format_error("cannot write matrix file: " + fname);
            out.write(reinterpret_cast<const char*>(seq.matrix.data()),
                      static_cast<std::streamsize>(bytes));
        }
        entry["features"] = std::move(feats);
        songs.push_back(std::move(entry));
    }
    manifest["songs"] = std::move(songs);
    std::ofstream out(fs::path(directory) / "manifest.json");
    if (!out) throw format_error("cannot write manifest in " + directory);
    out << manifest.dump(2) << "\n";
}

FeatureStore load_store(const std::string& directory) {
    const fs::path manifest_path = fs::path(directory) / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw integrity_error("missing manifest: " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw integrity_error("corrupt manifest: " + std::string(e.what()));
    }

    FeatureStore store;
    store.format_version = manifest.at("format_version").get<int>();
    if (store.format_version != kStoreFormatVersion)
        throw Error(ErrorKind::Integrity,
                    "store format version mismatch: found " +
                        std::to_string(store.format_version) + ", expected " +
                        std::to_string(kStoreFormatVersion));
    store.config = config_from_json(manifest.at("config"));

    for (const auto& entry : manifest.at("songs")) {
        SongRecord record;
        record.song_id = entry.at("song_id").get<std::string>();
        record.title = entry.at("title").get<std::string>();
        record.source_hash =
            std::stoull(entry.at("source_hash").get<std::string>(), nullptr, 16);
        for (const auto& [kind_name, meta] : entry.at("features").items()) {
            const FeatureKind kind = feature_kind_from_name(kind_name);
            FeatureSequence seq;
            seq.kind = kind;
            seq.config = store.config;
            seq.frames = meta.at("frames").get<int>();
            seq.dim = meta.at("dim").get<int>();
            const size_t expected_bytes = meta.at("byte_length").get<size_t>();
            if (expected_bytes != static_cast<size_t>(seq.frames) * seq.dim * sizeof(float))
                throw integrity_error("song " + record.song_id +
                                      ": manifest dimensions disagree with byte_length");
            const fs::path mpath = fs::path(directory) / meta.at("file").get<std::string>();
            std::error_code ec;
            const auto actual = fs::file_size(mpath, ec);
            if (ec || actual != expected_bytes)
                throw integrity_error("song " + record.song_id + ": matrix file " +
                                      mpath.filename().string() + " has " +
                                      (ec ? std::string("no") : std::to_string(actual)) +
                                      " bytes, manifest says " + std::to_string(expected_bytes));
            seq.matrix.resize(expected_bytes / sizeof(float));
            std::ifstream min(mpath, std::ios::binary);
            min.read(reinterpret_cast<char*>(seq.matrix.data()),
                     static_cast<std::streamsize>(expected_bytes));
            if (static_cast<size_t>(min.gcount()) != expected_bytes)
                throw integrity_error("song " + record.song_id + ": short read on " +
                                      mpath.filename().string());
            record.features[kind] = std::move(seq);
        }
        store.add(std::move(record));
    }
    return store;
}

}  // namespace qbh
