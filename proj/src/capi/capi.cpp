#include "qbh.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/similarity.hpp"
#include "core/store.hpp"
#include "core/synth.hpp"

namespace fs = std::filesystem;
using namespace qbh;

struct qbh_store {
    FeatureStore store;
};

struct qbh_result {
    std::vector<std::string> song_ids;
    std::vector<std::string> titles;
    std::vector<double> distances;
};

namespace {

thread_local std::string g_last_error;

qbh_status status_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Argument:
        case ErrorKind::Unsupported:
        case ErrorKind::Config:
            return QBH_ERR_USAGE;
        default:
            return QBH_ERR_DATA;
    }
}

template <typename Fn>
qbh_status guard(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return QBH_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_for(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QBH_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

extern "C" {

const char* qbh_version(void) { return "1.0.0"; }

const char* qbh_last_error(void) { return g_last_error.c_str(); }

qbh_status qbh_store_open(const char* directory, qbh_store** out) {
    if (!directory || !out) { g_last_error = "null argument"; return QBH_ERR_USAGE; }
    *out = nullptr;
    return guard([&] {
        auto handle = std::make_unique<qbh_store>();
        handle->store = load_store(directory);
        *out = handle.release();
    });
}

void qbh_store_close(qbh_store* store) { delete store; }

int qbh_store_song_count(const qbh_store* store) {
    return store ? static_cast<int>(store->store.records.size()) : -1;
}

qbh_status qbh_store_info_json(const qbh_store* store, char** json_out) {
    if (!store || !json_out) { g_last_error = "null argument"; return QBH_ERR_USAGE; }
    return guard([&] {
        nlohmann::json info;
        info["format_version"] = store->store.format_version;
        const auto& c = store->store.config;
        info["config"] = {{"frame_len", c.frame_len},
                          {"hop", c.hop},
                          {"pre_emphasis_alpha", c.pre_emphasis_alpha},
                          {"sample_rate_hz", c.sample_rate_hz},
                          {"num_mel_filters", c.num_mel_filters},
                          {"fft_size", c.fft_size},
                          {"lpc_order", c.lpc_order},
                          {"lpcc_count", c.lpcc_count}};
        info["song_count"] = store->store.records.size();
        nlohmann::json songs = nlohmann::json::array();
        for (const auto& r : store->store.records) {
            nlohmann::json frames;
            for (const auto& [kind, seq] : r.features)
                frames[feature_kind_name(kind)] = seq.frames;
            songs.push_back({{"song_id", r.song_id}, {"title", r.title}, {"frames", frames}});
        }
        info["songs"] = std::move(songs);
        *json_out = dup_string(info.dump(2));
    });
}

void qbh_string_free(char* s) { std::free(s); }

qbh_status qbh_ingest(const char* directory, const qbh_ingest_item* items, size_t count) {
    if (!directory || (!items && count > 0)) { g_last_error = "null argument"; return QBH_ERR_USAGE; }
    return guard([&] {
        FeatureStore store;
        const bool exists = fs::exists(fs::path(directory) / "manifest.json");
        if (exists) store = load_store(directory);

        for (size_t i = 0; i < count; ++i) {
            if (!items[i].wav_path || !items[i].song_id)
                throw argument_error("ingest item " + std::to_string(i) + " has null fields");
            store.add(ingest_song(items[i].wav_path, items[i].song_id,
                                  items[i].title ? items[i].title : "", store.config));
        }

        // write-to-temp then swap, so a failed ingest never corrupts the store
        std::random_device rd;
        const fs::path dir(directory);
        const fs::path tmp = dir.parent_path().empty()
                                 ? fs::path(dir.string() + ".tmp-" + std::to_string(rd()))
                                 : dir.parent_path() / (dir.filename().string() + ".tmp-" +
                                                        std::to_string(rd()));
        save_store(store, tmp.string());
        if (exists) {
            const fs::path old(tmp.string() + ".old");
            fs::rename(dir, old);
            fs::rename(tmp, dir);
            fs::remove_all(old);
        } else {
            fs::rename(tmp, dir);
        }
    });
}

qbh_status qbh_query(const qbh_store* store, const char* query_wav_path, const char* feature,
                     const char* measure, qbh_result** out) {
    if (!store || !query_wav_path || !feature || !measure || !out) {
        g_last_error = "null argument";
        return QBH_ERR_USAGE;
    }
    *out = nullptr;
    return guard([&] {
        if (store->store.records.empty()) throw data_error("store is empty");
        const FeatureKind kind = feature_kind_from_name(feature);
        DistanceMeasure m;
        m.kind = measure_kind_from_name(measure);

        const AudioClip clip = preprocess_audio(query_wav_path, store->store.config);
        const FeatureSequence query = extract_features(clip, kind, store->store.config);

        std::vector<CorpusEntry> corpus;
        for (const auto& r : store->store.records) {
            auto it = r.features.find(kind);
            if (it == r.features.end())
                throw data_error("song " + r.song_id + " lacks " + feature + " features");
            corpus.push_back({r.song_id, r.song_id, &it->second});
        }
        const RankedList list = rank(query, query_wav_path, corpus, m);

        auto result = std::make_unique<qbh_result>();
        for (const auto& entry : list.entries) {
            result->song_ids.push_back(entry.song_id);
            result->titles.push_back(store->store.find(entry.song_id)->title);
            result->distances.push_back(entry.distance);
        }
        *out = result.release();
    });
}

size_t qbh_result_count(const qbh_result* result) { return result ? result->song_ids.size() : 0; }

const char* qbh_result_song_id(const qbh_result* result, size_t index) {
    return (result && index < result->song_ids.size()) ? result->song_ids[index].c_str() : nullptr;
}

const char* qbh_result_title(const qbh_result* result, size_t index) {
    return (result && index < result->titles.size()) ? result->titles[index].c_str() : nullptr;
}

double qbh_result_distance(const qbh_result* result, size_t index) {
    return (result && index < result->distances.size()) ? result->distances[index] : -1.0;
}

void qbh_result_free(qbh_result* result) { delete result; }

qbh_status qbh_evaluate(const qbh_store* store, const char* query_manifest_path,
                        const qbh_eval_options* options, const char* out_csv_path,
                        char** csv_out) {
    if (!store || !query_manifest_path) { g_last_error = "null argument"; return QBH_ERR_USAGE; }
    return guard([&] {
        std::ifstream manifest(query_manifest_path);
        if (!manifest) throw format_error(std::string("cannot open query manifest: ") +
                                          query_manifest_path);

        struct PendingQuery { std::string path, target; };
        std::vector<PendingQuery> pending;
        std::string line;
        while (std::getline(manifest, line)) {
            if (line.empty()) continue;
            const auto comma = line.rfind(',');
            if (comma == std::string::npos)
                throw format_error("query manifest line without comma: " + line);
            pending.push_back({line.substr(0, comma), line.substr(comma + 1)});
        }
        if (pending.empty()) throw argument_error("query manifest is empty");
        // validate targets before any feature extraction
        for (const auto& p : pending)
            if (!store->store.find(p.target))
                throw config_error("query target not in store: " + p.target);

        EvalGrid grid;
        uint64_t seed = 0;
        if (options) {
            seed = options->seed;
            if (options->features_csv) {
                grid.features.clear();
                for (const auto& name : split_csv(options->features_csv))
                    grid.features.push_back(feature_kind_from_name(name));
            }
            if (options->measures_csv) {
                grid.measures.clear();
                for (const auto& name : split_csv(options->measures_csv))
                    grid.measures.push_back(measure_kind_from_name(name));
            }
            if (options->excerpts_csv) {
                grid.excerpt_pcts.clear();
                for (const auto& s : split_csv(options->excerpts_csv))
                    grid.excerpt_pcts.push_back(std::stoi(s));
            }
            if (options->db_sizes_csv) {
                for (const auto& s : split_csv(options->db_sizes_csv))
                    grid.db_sizes.push_back(std::stoi(s));
            }
        }

        std::vector<QuerySpec> queries;
        for (const auto& p : pending) {
            QuerySpec q;
            q.query_id = p.path;
            q.target_song_id = p.target;
            const AudioClip clip = preprocess_audio(p.path, store->store.config);
            for (FeatureKind kind : grid.features)
                q.features[kind] = extract_features(clip, kind, store->store.config);
            queries.push_back(std::move(q));
        }

        const EvalReport report = run_experiment(store->store, queries, grid, seed);
        const std::string csv = report_to_csv(report);
        if (out_csv_path) {
            std::ofstream out(out_csv_path, std::ios::binary);
            if (!out) throw format_error(std::string("cannot write CSV: ") + out_csv_path);
            out << csv;
        }
        if (csv_out) *csv_out = dup_string(csv);
    });
}

qbh_status qbh_synth_corpus(const char* out_dir, int num_songs, double seconds,
                            double tempo_jitter_pct, double noise_snr_db, uint64_t seed) {
    if (!out_dir) { g_last_error = "null argument"; return QBH_ERR_USAGE; }
    return guard([&] {
        SynthParams params;
        params.num_songs = num_songs;
        params.seconds = seconds;
        params.tempo_jitter_pct = tempo_jitter_pct;
        params.noise_snr_db = noise_snr_db;
        params.seed = seed;
        write_synth_corpus(params, out_dir);
    });
}

}  // extern "C"
