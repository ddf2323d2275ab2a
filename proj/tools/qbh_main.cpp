// Command-line front end for the QBH retrieval engine. Talks to the
// engine exclusively through the C API in qbh.h.
#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbh.h"

namespace {

int fail(qbh_status status) {
    std::fprintf(stderr, "error: %s\n", qbh_last_error());
    return static_cast<int>(status);
}

std::string default_store() {
    const char* env = std::getenv("QBH_STORE");
    return env ? env : "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Query-by-singing/humming retrieval engine"};
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Add WAV files to a feature store");
    std::string store_dir = default_store();
    std::vector<std::string> songs;  // each "path:id[:title]"
    std::string ingest_manifest;
    ingest->add_option("--store", store_dir, "Store directory")->required(default_store().empty());
    ingest->add_option("--song", songs, "Song as path:id[:title] (repeatable)");
    ingest->add_option("--manifest", ingest_manifest, "CSV manifest: path,id,title per line");

    // query
    auto* query = app.add_subcommand("query", "Rank stored songs against a query WAV");
    std::string q_store = default_store(), q_wav, q_feature = "MFCC", q_measure = "DTW";
    int top_n = 10;
    query->add_option("--store", q_store, "Store directory")->required(default_store().empty());
    query->add_option("--input", q_wav, "Query WAV file")->required();
    query->add_option("--feature", q_feature, "Feature kind: MFCC, LPC or LPCC");
    query->add_option("--measure", q_measure, "Distance measure: ED, KNN or DTW");
    query->add_option("--top", top_n, "Number of results to print");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Run the retrieval evaluation grid");
    std::string e_store = default_store(), e_manifest, e_out = "report.csv";
    std::string e_features, e_measures, e_excerpts, e_db_sizes;
    uint64_t e_seed = 0;
    evaluate->add_option("--store", e_store, "Store directory")->required(default_store().empty());
    evaluate->add_option("--queries", e_manifest, "Query manifest CSV: wav_path,target_id")
        ->required();
    evaluate->add_option("--features", e_features, "Comma list (default MFCC,LPC,LPCC)");
    evaluate->add_option("--measures", e_measures, "Comma list (default ED,KNN,DTW)");
    evaluate->add_option("--excerpts", e_excerpts, "Comma list of percentages (default 60,70,80,90,100)");
    evaluate->add_option("--db-sizes", e_db_sizes, "Comma list of database sizes (default: full store)");
    evaluate->add_option("--seed", e_seed, "Random seed for excerpt placement");
    evaluate->add_option("--out", e_out, "Output CSV path");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Print store configuration and contents");
    std::string i_store = default_store();
    inspect->add_option("--store", i_store, "Store directory")->required(default_store().empty());

    // synth-corpus (used by the acceptance tests; not advertised)
    auto* synth = app.add_subcommand("synth-corpus", "Generate a seeded synthetic corpus");
    synth->group("");
    std::string s_out;
    int s_songs = 50;
    double s_seconds = 2.0, s_tempo = 10.0, s_snr = 20.0;
    uint64_t s_seed = 1;
    synth->add_option("--out", s_out, "Output directory")->required();
    synth->add_option("--songs", s_songs, "Number of songs");
    synth->add_option("--seconds", s_seconds, "Seconds per song");
    synth->add_option("--tempo-jitter", s_tempo, "Query tempo jitter in percent");
    synth->add_option("--snr", s_snr, "Query noise SNR in dB (<=0 disables)");
    synth->add_option("--seed", s_seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (*ingest) {
        std::vector<qbh_ingest_item> items;
        std::vector<std::array<std::string, 3>> storage;
        for (const auto& s : songs) {
            const auto c1 = s.find(':');
            if (c1 == std::string::npos) {
                std::fprintf(stderr, "error: --song expects path:id[:title], got %s\n", s.c_str());
                return 1;
            }
            const auto c2 = s.find(':', c1 + 1);
            storage.push_back({s.substr(0, c1),
                               s.substr(c1 + 1, c2 == std::string::npos ? std::string::npos
                                                                        : c2 - c1 - 1),
                               c2 == std::string::npos ? "" : s.substr(c2 + 1)});
        }
        if (!ingest_manifest.empty()) {
            FILE* f = std::fopen(ingest_manifest.c_str(), "r");
            if (!f) {
                std::fprintf(stderr, "error: cannot open manifest %s\n", ingest_manifest.c_str());
                return 1;
            }
            char line[4096];
            while (std::fgets(line, sizeof(line), f)) {
                std::string l(line);
                while (!l.empty() && (l.back() == '\n' || l.back() == '\r')) l.pop_back();
                if (l.empty()) continue;
                const auto c1 = l.find(',');
                const auto c2 = l.find(',', c1 + 1);
                if (c1 == std::string::npos || c2 == std::string::npos) {
                    std::fprintf(stderr, "error: bad manifest line: %s\n", l.c_str());
                    std::fclose(f);
                    return 1;
                }
                storage.push_back({l.substr(0, c1), l.substr(c1 + 1, c2 - c1 - 1),
                                   l.substr(c2 + 1)});
            }
            std::fclose(f);
        }
        if (storage.empty()) {
            std::fprintf(stderr, "error: nothing to ingest; pass --song or --manifest\n");
            return 1;
        }
        for (const auto& s : storage)
            items.push_back({s[0].c_str(), s[1].c_str(), s[2].c_str()});
        const qbh_status st = qbh_ingest(store_dir.c_str(), items.data(), items.size());
        if (st != QBH_OK) return fail(st);
        for (const auto& s : storage)
            std::printf("ingested %s as %s\n", s[0].c_str(), s[1].c_str());
        return 0;
    }

    if (*query) {
        qbh_store* store = nullptr;
        qbh_status st = qbh_store_open(q_store.c_str(), &store);
        if (st != QBH_OK) return fail(st);
        qbh_result* result = nullptr;
        st = qbh_query(store, q_wav.c_str(), q_feature.c_str(), q_measure.c_str(), &result);
        if (st != QBH_OK) {
            qbh_store_close(store);
            return fail(st);
        }
        std::printf("rank,song_id,title,distance\n");
        const size_t count = qbh_result_count(result);
        for (size_t i = 0; i < count && i < static_cast<size_t>(top_n); ++i)
            std::printf("%zu,%s,%s,%.6f\n", i + 1, qbh_result_song_id(result, i),
                        qbh_result_title(result, i), qbh_result_distance(result, i));
        qbh_result_free(result);
        qbh_store_close(store);
        return 0;
    }

    if (*evaluate) {
        qbh_store* store = nullptr;
        qbh_status st = qbh_store_open(e_store.c_str(), &store);
        if (st != QBH_OK) return fail(st);
        qbh_eval_options options{};
        options.features_csv = e_features.empty() ? nullptr : e_features.c_str();
        options.measures_csv = e_measures.empty() ? nullptr : e_measures.c_str();
        options.excerpts_csv = e_excerpts.empty() ? nullptr : e_excerpts.c_str();
        options.db_sizes_csv = e_db_sizes.empty() ? nullptr : e_db_sizes.c_str();
        options.seed = e_seed;
        char* csv = nullptr;
        st = qbh_evaluate(store, e_manifest.c_str(), &options, e_out.c_str(), &csv);
        qbh_store_close(store);
        if (st != QBH_OK) return fail(st);
        std::printf("%s", csv);  // summary to stdout, same rows as the CSV
        qbh_string_free(csv);
        std::printf("report written to %s\n", e_out.c_str());
        return 0;
    }

    if (*inspect) {
        qbh_store* store = nullptr;
        qbh_status st = qbh_store_open(i_store.c_str(), &store);
        if (st != QBH_OK) return fail(st);
        char* json = nullptr;
        st = qbh_store_info_json(store, &json);
        qbh_store_close(store);
        if (st != QBH_OK) return fail(st);
        std::printf("%s\n", json);
        qbh_string_free(json);
        return 0;
    }

    if (*synth) {
        const qbh_status st =
            qbh_synth_corpus(s_out.c_str(), s_songs, s_seconds, s_tempo, s_snr, s_seed);
        if (st != QBH_OK) return fail(st);
        std::printf("synthetic corpus written to %s\n", s_out.c_str());
        return 0;
    }

    return 1;
}
