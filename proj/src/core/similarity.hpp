#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/features.hpp"

namespace qbh {

enum class MeasureKind { ED, KNN, DTW };

const char* measure_kind_name(MeasureKind kind);
MeasureKind measure_kind_from_name(const std::string& name);

struct DistanceMeasure {
    MeasureKind kind = MeasureKind::ED;
    int k = 3;                         // KNN votes
    int t_norm = 100;                  // frames for ED time normalization
    std::optional<int> band;           // Sakoe-Chiba half-width; unset = unconstrained
    bool dtw_path_normalize = false;   // divide DTW cost by path length

    void validate() const;
};

struct RankedEntry {
    std::string song_id;
    double distance = 0.0;
};

struct RankedList {
    std::string query_id;
    std::vector<RankedEntry> entries;
    DistanceMeasure measure;
};

// One searchable corpus item. label groups multiple recordings of the
// same song for kNN voting; it defaults to the song id.
struct CorpusEntry {
    std::string song_id;
    std::string label;
    const FeatureSequence* features = nullptr;
};

double euclidean_sq(const float* x, const float* p, int dim);
double euclidean_sq(const std::vector<double>& x, const std::vector<double>& p);

FeatureSequence time_normalize(const FeatureSequence& seq, int t_norm);

double sequence_ed(const FeatureSequence& q, const FeatureSequence& c, int t_norm);

double dtw(const FeatureSequence& q, const FeatureSequence& c,
           std::optional<int> band = std::nullopt, bool path_normalize = false);

RankedList rank_all(const FeatureSequence& query, const std::string& query_id,
                    const std::vector<CorpusEntry>& corpus, const DistanceMeasure& measure);

RankedList knn_rank(const FeatureSequence& query, const std::string& query_id,
                    const std::vector<CorpusEntry>& corpus, const DistanceMeasure& measure);

// Dispatches on measure.kind.
RankedList rank(const FeatureSequence& query, const std::string& query_id,
                const std::vector<CorpusEntry>& corpus, const DistanceMeasure& measure);

}  // namespace qbh
