#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "qbh.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / (name + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("C API end to end: synth, ingest, query, evaluate, inspect") {
    TempDir dir("qbh_capi_");
    const auto corpus = (dir.path / "corpus").string();
    REQUIRE(qbh_synth_corpus(corpus.c_str(), 4, 1.5, 10.0, 20.0, 7) == QBH_OK);
    REQUIRE(fs::exists(fs::path(corpus) / "songs" / "song0000.wav"));
    REQUIRE(fs::exists(fs::path(corpus) / "queries.csv"));

    // build the ingest item list from the generated manifest
    std::vector<qbh_ingest_item> items;
    std::vector<std::array<std::string, 3>> storage;
    std::ifstream manifest(fs::path(corpus) / "ingest.csv");
    std::string line;
    while (std::getline(manifest, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        storage.push_back({line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1),
                           line.substr(c2 + 1)});
    }
    REQUIRE(storage.size() == 4);
    for (const auto& s : storage) items.push_back({s[0].c_str(), s[1].c_str(), s[2].c_str()});

    const auto store_dir = (dir.path / "store").string();
    REQUIRE(qbh_ingest(store_dir.c_str(), items.data(), items.size()) == QBH_OK);

    qbh_store* store = nullptr;
    REQUIRE(qbh_store_open(store_dir.c_str(), &store) == QBH_OK);
    CHECK(qbh_store_song_count(store) == 4);

    SUBCASE("self-query ranks first with zero distance") {
        qbh_result* result = nullptr;
        REQUIRE(qbh_query(store, storage[1][0].c_str(), "MFCC", "DTW", &result) == QBH_OK);
        REQUIRE(qbh_result_count(result) == 4);
        CHECK(std::string(qbh_result_song_id(result, 0)) == "song0001");
        CHECK(qbh_result_distance(result, 0) <= 1e-9);
        CHECK(qbh_result_title(result, 0) != nullptr);
        qbh_result_free(result);
    }

    SUBCASE("invalid measure name is a usage error") {
        qbh_result* result = nullptr;
        CHECK(qbh_query(store, storage[0][0].c_str(), "MFCC", "COSINE", &result) == QBH_ERR_USAGE);
        CHECK(std::string(qbh_last_error()).find("COSINE") != std::string::npos);
    }

    SUBCASE("inspect reports config and per-song frames") {
        char* json = nullptr;
        REQUIRE(qbh_store_info_json(store, &json) == QBH_OK);
        const std::string text(json);
        CHECK(text.find("\"format_version\"") != std::string::npos);
        CHECK(text.find("song0003") != std::string::npos);
        CHECK(text.find("LPCC") != std::string::npos);
        qbh_string_free(json);
    }

    SUBCASE("evaluate is deterministic byte for byte") {
        const auto csv1 = (dir.path / "r1.csv").string();
        const auto csv2 = (dir.path / "r2.csv").string();
        qbh_eval_options options{};
        options.excerpts_csv = "80,100";
        options.measures_csv = "ED";
        options.seed = 42;
        const auto qmanifest = (fs::path(corpus) / "queries.csv").string();
        REQUIRE(qbh_evaluate(store, qmanifest.c_str(), &options, csv1.c_str(), nullptr) == QBH_OK);
        REQUIRE(qbh_evaluate(store, qmanifest.c_str(), &options, csv2.c_str(), nullptr) == QBH_OK);
        std::ifstream a(csv1), b(csv2);
        const std::string ta((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        const std::string tb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(ta == tb);
        CHECK(ta.rfind("feature,measure,excerpt_pct,db_size,n_queries,top10,top20,top30,moa,mrr\n",
                       0) == 0);
        // 3 features x 1 measure x 2 excerpts x 1 db size + header
        CHECK(std::count(ta.begin(), ta.end(), '\n') == 7);
    }

    SUBCASE("evaluate rejects unknown targets before computing") {
        const auto bad = (dir.path / "bad_queries.csv").string();
        std::ofstream out(bad);
        out << storage[0][0] << ",nonexistent\n";
        out.close();
        CHECK(qbh_evaluate(store, bad.c_str(), nullptr, nullptr, nullptr) == QBH_ERR_USAGE);
    }

    qbh_store_close(store);
}

TEST_CASE("failed ingest leaves the store untouched") {
    TempDir dir("qbh_atomic_");
    const auto corpus = (dir.path / "corpus").string();
    REQUIRE(qbh_synth_corpus(corpus.c_str(), 2, 1.0, 0.0, 0.0, 3) == QBH_OK);
    const auto wav0 = (fs::path(corpus) / "songs" / "song0000.wav").string();
    const auto wav1 = (fs::path(corpus) / "songs" / "song0001.wav").string();

    const auto store_dir = (dir.path / "store").string();
    qbh_ingest_item first{wav0.c_str(), "a", "A"};
    REQUIRE(qbh_ingest(store_dir.c_str(), &first, 1) == QBH_OK);

    // second batch contains a corrupt file; nothing may change
    const auto bogus = (dir.path / "bogus.wav").string();
    std::ofstream(bogus) << "garbage";
    qbh_ingest_item batch[2] = {{wav1.c_str(), "b", "B"}, {bogus.c_str(), "c", "C"}};
    CHECK(qbh_ingest(store_dir.c_str(), batch, 2) != QBH_OK);

    qbh_store* store = nullptr;
    REQUIRE(qbh_store_open(store_dir.c_str(), &store) == QBH_OK);
    CHECK(qbh_store_song_count(store) == 1);
    qbh_store_close(store);

    // duplicate id is rejected
    qbh_ingest_item dup{wav1.c_str(), "a", "again"};
    CHECK(qbh_ingest(store_dir.c_str(), &dup, 1) == QBH_ERR_DATA);
}

TEST_CASE("opening a missing store fails cleanly") {
    qbh_store* store = nullptr;
    CHECK(qbh_store_open("/nonexistent/store/dir", &store) == QBH_ERR_DATA);
    CHECK(store == nullptr);
    CHECK(std::strlen(qbh_last_error()) > 0);
}

TEST_CASE("identical ingests produce byte-identical stores") {
    TempDir dir("qbh_det_");
    const auto corpus = (dir.path / "corpus").string();
    REQUIRE(qbh_synth_corpus(corpus.c_str(), 2, 1.0, 0.0, 0.0, 9) == QBH_OK);
    const auto wav0 = (fs::path(corpus) / "songs" / "song0000.wav").string();
    const auto wav1 = (fs::path(corpus) / "songs" / "song0001.wav").string();
    qbh_ingest_item items[2] = {{wav0.c_str(), "x", "X"}, {wav1.c_str(), "y", "Y"}};

    const auto s1 = (dir.path / "s1").string();
    const auto s2 = (dir.path / "s2").string();
    REQUIRE(qbh_ingest(s1.c_str(), items, 2) == QBH_OK);
    REQUIRE(qbh_ingest(s2.c_str(), items, 2) == QBH_OK);

    for (const auto& entry : fs::directory_iterator(s1)) {
        std::ifstream a(entry.path(), std::ios::binary);
        std::ifstream b(fs::path(s2) / entry.path().filename(), std::ios::binary);
        REQUIRE(b.good());
        const std::string ta((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        const std::string tb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(ta == tb);
    }
}
