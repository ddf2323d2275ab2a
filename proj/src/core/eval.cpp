#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "core/errors.hpp"

namespace qbh {

FeatureSequence make_excerpt(const FeatureSequence& features, int proportion_pct,
                             ExcerptMode mode, uint64_t seed) {
    if (proportion_pct < 1 || proportion_pct > 100)
        throw argument_error("proportion must be in [1, 100]");
    if (features.frames < 1) throw argument_error("empty feature sequence");
    const int keep = static_cast<int>(
        std::ceil(static_cast<double>(features.frames) * proportion_pct / 100.0));
    if (keep < 1) throw argument_error("excerpt would be empty");
    if (keep >= features.frames) return features;

    int start = 0;
    if (mode == ExcerptMode::RandomSegment) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> offset(0, features.frames - keep);
        start = offset(rng);
    }
    FeatureSequence out;
    out.kind = features.kind;
    out.config = features.config;
    out.frames = keep;
    out.dim = features.dim;
    out.matrix.assign(features.matrix.begin() + static_cast<size_t>(start) * features.dim,
                      features.matrix.begin() + static_cast<size_t>(start + keep) * features.dim);
    return out;
}

double top_x_hit_rate(const std::vector<RankSample>& samples, int x) {
    if (samples.empty()) throw argument_error("no rank samples");
    int hits = 0;
    for (const auto& s : samples)
        if (s.rank <= x) ++hits;
    return static_cast<double>(hits) / samples.size();
}

double mean_of_accuracy(const std::vector<RankSample>& samples, int db_size) {
    if (samples.empty()) throw argument_error("no rank samples");
    if (db_size < 2) throw argument_error("database size must be >= 2");
    double acc = 0.0;
    for (const auto& s : samples) {
        if (s.rank > db_size) throw argument_error("rank exceeds database size");
        acc += static_cast<double>(db_size - s.rank) / (db_size - 1);
    }
    return acc / samples.size();
}

double mean_reciprocal_rank(const std::vector<RankSample>& samples) {
    if (samples.empty()) throw argument_error("no rank samples");
    double acc = 0.0;
    for (const auto& s : samples) acc += 1.0 / s.rank;
    return acc / samples.size();
}

namespace {

// Deterministic first-N sub-database by sorted id, with the target
// swapped into the last slot when absent.
std::vector<const SongRecord*> sub_database(const std::vector<const SongRecord*>& sorted,
                                            int n, const std::string& target_id) {
    std::vector<const SongRecord*> sub(sorted.begin(), sorted.begin() + n);
    const bool has_target = std::any_of(sub.begin(), sub.end(), [&](const SongRecord* r) {
        return r->song_id == target_id;
    });
    if (!has_target) {
        auto it = std::find_if(sorted.begin(), sorted.end(), [&](const SongRecord* r) {
            return r->song_id == target_id;
        });
        sub.back() = *it;
    }
    return sub;
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

EvalReport run_experiment(const FeatureStore& store, const std::vector<QuerySpec>& queries,
                          const EvalGrid& grid, uint64_t seed) {
    if (store.records.empty()) throw argument_error("store is empty");
    if (queries.empty()) throw argument_error("no queries");
    for (const auto& q : queries)
        if (!store.find(q.target_song_id))
            throw config_error("query target not in store: " + q.target_song_id);

    std::vector<const SongRecord*> sorted;
    for (const auto& r : store.records) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](const SongRecord* a, const SongRecord* b) {
        return a->song_id < b->song_id;
    });

    std::vector<int> db_sizes = grid.db_sizes;
    if (db_sizes.empty()) db_sizes.push_back(static_cast<int>(store.records.size()));
    for (int n : db_sizes) {
        if (n < 1) throw argument_error("database size must be >= 1");
        if (n > static_cast<int>(store.records.size()))
            throw argument_error("database size exceeds store size");
    }

    EvalReport report;
    for (FeatureKind feature : grid.features) {
        for (MeasureKind measure_kind : grid.measures) {
            for (int pct : grid.excerpt_pcts) {
                for (int n : db_sizes) {
                    EvalCell cell;
                    cell.feature = feature;
                    cell.measure = measure_kind;
                    cell.excerpt_pct = pct;
                    cell.db_size = n;

                    DistanceMeasure measure = grid.measure_params;
                    measure.kind = measure_kind;

                    for (size_t qi = 0; qi < queries.size(); ++qi) {
                        const auto& q = queries[qi];
                        auto fit = q.features.find(feature);
                        if (fit == q.features.end())
                            throw data_error("query " + q.query_id + " lacks " +
                                             std::string(feature_kind_name(feature)) +
                                             " features");
                        const auto sub = sub_database(sorted, n, q.target_song_id);
                        std::vector<CorpusEntry> corpus;
                        corpus.reserve(sub.size());
                        for (const SongRecord* r : sub) {
                            auto rit = r->features.find(feature);
                            if (rit == r->features.end())
                                throw data_error("song " + r->song_id + " lacks " +
                                                 std::string(feature_kind_name(feature)) +
                                                 " features");
                            corpus.push_back({r->song_id, r->song_id, &rit->second});
                        }
                        const auto excerpt = make_excerpt(fit->second, pct, grid.excerpt_mode,
                                                          mix_seed(seed, qi));
                        const auto list = rank(excerpt, q.query_id, corpus, measure);
                        int target_rank = 0;
                        for (size_t i = 0; i < list.entries.size(); ++i) {
                            if (list.entries[i].song_id == q.target_song_id) {
                                target_rank = static_cast<int>(i) + 1;
                                break;
                            }
                        }
                        cell.samples.push_back({q.query_id, q.target_song_id, target_rank});
                    }

                    cell.n_queries = static_cast<int>(cell.samples.size());
                    cell.top10 = top_x_hit_rate(cell.samples, 10);
                    cell.top20 = top_x_hit_rate(cell.samples, 20);
                    cell.top30 = top_x_hit_rate(cell.samples, 30);
                    cell.moa = (n >= 2) ? mean_of_accuracy(cell.samples, n) : 1.0;
                    cell.mrr = mean_reciprocal_rank(cell.samples);
                    report.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return report;
}

std::string report_to_csv(const EvalReport& report) {
    std::string out = "feature,measure,excerpt_pct,db_size,n_queries,top10,top20,top30,moa,mrr\n";
    char buf[256];
    for (const auto& c : report.cells) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%d,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      feature_kind_name(c.feature), measure_kind_name(c.measure), c.excerpt_pct,
                      c.db_size, c.n_queries, c.top10, c.top20, c.top30, c.moa, c.mrr);
        out += buf;
    }
    return out;
}

}  // namespace qbh
