#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/similarity.hpp"
#include "core/store.hpp"

namespace qbh {

struct RankSample {
    std::string query_id;
    std::string target_song_id;
    int rank = 0;  // 1-based position of the target
};

struct EvalCell {
    FeatureKind feature;
    MeasureKind measure;
    int excerpt_pct = 0;
    int db_size = 0;
    int n_queries = 0;
    double top10 = 0.0, top20 = 0.0, top30 = 0.0;
    double moa = 0.0;
    double mrr = 0.0;
    std::vector<RankSample> samples;
};

struct EvalReport {
    std::vector<EvalCell> cells;
};

enum class ExcerptMode { Prefix, RandomSegment };

// Keeps ceil(frames * proportion / 100) frames; prefix or a seeded
// random contiguous segment.
FeatureSequence make_excerpt(const FeatureSequence& features, int proportion_pct,
                             ExcerptMode mode, uint64_t seed);

double top_x_hit_rate(const std::vector<RankSample>& samples, int x);
double mean_of_accuracy(const std::vector<RankSample>& samples, int db_size);
double mean_reciprocal_rank(const std::vector<RankSample>& samples);

// One query: pre-extracted full-length features per kind, plus the
// expected target in the store.
struct QuerySpec {
    std::string query_id;
    std::string target_song_id;
    std::map<FeatureKind, FeatureSequence> features;
};

struct EvalGrid {
    std::vector<FeatureKind> features{FeatureKind::MFCC, FeatureKind::LPC, FeatureKind::LPCC};
    std::vector<MeasureKind> measures{MeasureKind::ED, MeasureKind::KNN, MeasureKind::DTW};
    std::vector<int> excerpt_pcts{60, 70, 80, 90, 100};
    std::vector<int> db_sizes;  // empty = full store size
    ExcerptMode excerpt_mode = ExcerptMode::Prefix;
    DistanceMeasure measure_params;  // k, t_norm, band
};

EvalReport run_experiment(const FeatureStore& store, const std::vector<QuerySpec>& queries,
                          const EvalGrid& grid, uint64_t seed);

// header: feature,measure,excerpt_pct,db_size,n_queries,top10,top20,top30,moa,mrr
std::string report_to_csv(const EvalReport& report);

}  // namespace qbh
