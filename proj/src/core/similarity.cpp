#include "core/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <thread>

#include "core/errors.hpp"

namespace qbh {

const char* measure_kind_name(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::ED: return "ED";
        case MeasureKind::KNN: return "KNN";
        case MeasureKind::DTW: return "DTW";
    }
    return "?";
}

MeasureKind measure_kind_from_name(const std::string& name) {
    if (name == "ED" || name == "ed") return MeasureKind::ED;
    if (name == "KNN" || name == "knn") return MeasureKind::KNN;
    if (name == "DTW" || name == "dtw") return MeasureKind::DTW;
    throw argument_error("unknown measure: " + name + " (expected ED, KNN or DTW)");
}

void DistanceMeasure::validate() const {
    if (k < 1) throw argument_error("k must be >= 1");
    if (t_norm < 2) throw argument_error("t_norm must be >= 2");
    if (band && *band < 1) throw argument_error("band half-width must be >= 1");
}

double euclidean_sq(const float* x, const float* p, int dim) {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = static_cast<double>(x[i]) - static_cast<double>(p[i]);
        acc += d * d;
    }
    return acc;
}

double euclidean_sq(const std::vector<double>& x, const std::vector<double>& p) {
    if (x.size() != p.size()) throw argument_error("dimension mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - p[i];
        acc += d * d;
    }
    return acc;
}

FeatureSequence time_normalize(const FeatureSequence& seq, int t_norm) {
    if (seq.frames < 1) throw argument_error("cannot normalize an empty sequence");
    if (t_norm < 1) throw argument_error("t_norm must be >= 1");
    if (seq.frames == t_norm) return seq;

    FeatureSequence out;
    out.kind = seq.kind;
    out.config = seq.config;
    out.frames = t_norm;
    out.dim = seq.dim;
    out.matrix.resize(static_cast<size_t>(t_norm) * seq.dim);
    for (int t = 0; t < t_norm; ++t) {
        const double pos = (t_norm == 1) ? 0.0
                                         : static_cast<double>(t) * (seq.frames - 1) / (t_norm - 1);
        const int i = std::min(static_cast<int>(pos), seq.frames - 1);
        const int j = std::min(i + 1, seq.frames - 1);
        const double frac = pos - i;
        for (int d = 0; d < seq.dim; ++d) {
            const double a = seq.at(i, d);
            const double b = seq.at(j, d);
            out.matrix[static_cast<size_t>(t) * seq.dim + d] =
                static_cast<float>(a + frac * (b - a));
        }
    }
    return out;
}

namespace {

void check_comparable(const FeatureSequence& q, const FeatureSequence& c) {
    if (q.kind != c.kind)
        throw argument_error(std::string("feature kind mismatch: ") + feature_kind_name(q.kind) +
                             " vs " + feature_kind_name(c.kind));
    if (q.dim != c.dim)
        throw argument_error("feature dimension mismatch: " + std::to_string(q.dim) + " vs " +
                             std::to_string(c.dim));
}

}  // namespace

double sequence_ed(const FeatureSequence& q, const FeatureSequence& c, int t_norm) {
    check_comparable(q, c);
    const auto qn = time_normalize(q, t_norm);
    const auto cn = time_normalize(c, t_norm);
    double acc = 0.0;
    for (int t = 0; t < t_norm; ++t) acc += euclidean_sq(qn.row(t), cn.row(t), qn.dim);
    return acc;
}

double dtw(const FeatureSequence& q, const FeatureSequence& c,
           std::optional<int> band, bool path_normalize) {
    check_comparable(q, c);
    const int n = q.frames;
    const int m = c.frames;
    if (n < 1 || m < 1) throw argument_error("DTW needs non-empty sequences");
    if (band && *band < std::abs(n - m))
        throw config_error("Sakoe-Chiba band " + std::to_string(*band) +
                           " cannot connect sequences of lengths " + std::to_string(n) + " and " +
                           std::to_string(m));

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m, inf), curr(m, inf);
    std::vector<int> prev_len(m, 0), curr_len(m, 0);

    for (int i = 0; i < n; ++i) {
        std::fill(curr.begin(), curr.end(), inf);
        int lo = 0, hi = m - 1;
        if (band) {
            lo = std::max(0, i - *band);
            hi = std::min(m - 1, i + *band);
        }
        for (int j = lo; j <= hi; ++j) {
            const double cost = euclidean_sq(q.row(i), c.row(j), q.dim);
            if (i == 0 && j == 0) {
                curr[j] = cost;
                curr_len[j] = 1;
                continue;
            }
            double best = inf;
            int best_len = 0;
            if (i > 0 && j > 0 && prev[j - 1] < best) { best = prev[j - 1]; best_len = prev_len[j - 1]; }
            if (i > 0 && prev[j] < best) { best = prev[j]; best_len = prev_len[j]; }
            if (j > 0 && curr[j - 1] < best) { best = curr[j - 1]; best_len = curr_len[j - 1]; }
            curr[j] = best + cost;
            curr_len[j] = best_len + 1;
        }
        std::swap(prev, curr);
        std::swap(prev_len, curr_len);
    }
    double d = prev[m - 1];
    if (path_normalize && prev_len[m - 1] > 0) d /= prev_len[m - 1];
    return d;
}

namespace {

std::vector<double> all_distances(const FeatureSequence& query,
                                  const std::vector<CorpusEntry>& corpus,
                                  const DistanceMeasure& measure) {
    for (const auto& entry : corpus) {
        if (!entry.features)
            throw data_error("song " + entry.song_id + " is missing features of kind " +
                             feature_kind_name(query.kind));
        check_comparable(query, *entry.features);
    }

    std::vector<double> dist(corpus.size());
    auto compute = [&](size_t idx) {
        const auto& seq = *corpus[idx].features;
        if (measure.kind == MeasureKind::DTW)
            dist[idx] = dtw(query, seq, measure.band, measure.dtw_path_normalize);
        else
            dist[idx] = sequence_ed(query, seq, measure.t_norm);
    };

    const size_t hw = std::max<size_t>(1, std::thread::hardware_concurrency());
    if (corpus.size() < 4 || hw < 2) {
        for (size_t i = 0; i < corpus.size(); ++i) compute(i);
        return dist;
    }
    const size_t workers = std::min(hw, corpus.size());
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (size_t i = w; i < corpus.size(); i += workers) compute(i);
        });
    }
    for (auto& t : pool) t.join();
    return dist;
}

std::vector<size_t> sorted_order(const std::vector<CorpusEntry>& corpus,
                                 const std::vector<double>& dist) {
    std::vector<size_t> order(corpus.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return corpus[a].song_id < corpus[b].song_id;  // stable tie-break
    });
    return order;
}

}  // namespace

RankedList rank_all(const FeatureSequence& query, const std::string& query_id,
                    const std::vector<CorpusEntry>& corpus, const DistanceMeasure& measure) {
    if (corpus.empty()) throw argument_error("corpus is empty");
    measure.validate();
    const auto dist = all_distances(query, corpus, measure);
    const auto order = sorted_order(corpus, dist);

    RankedList list;
    list.query_id = query_id;
    list.measure = measure;
    list.entries.reserve(order.size());
    for (size_t idx : order) list.entries.push_back({corpus[idx].song_id, dist[idx]});
    return list;
}

RankedList knn_rank(const FeatureSequence& query, const std::string& query_id,
                    const std::vector<CorpusEntry>& corpus, const DistanceMeasure& measure) {
    if (corpus.empty()) throw argument_error("corpus is empty");
    measure.validate();
    if (static_cast<size_t>(measure.k) > corpus.size())
        throw argument_error("k exceeds corpus size");

    const auto dist = all_distances(query, corpus, measure);
    const auto order = sorted_order(corpus, dist);

    // Votes among the k nearest records, keyed by song-group label.
    struct Group { int votes = 0; double min_dist = 0.0; };
    std::map<std::string, Group> groups;
    for (int i = 0; i < measure.k; ++i) {
        const auto& entry = corpus[order[i]];
        auto [it, inserted] = groups.try_emplace(entry.label, Group{0, dist[order[i]]});
        it->second.votes += 1;
        it->second.min_dist = std::min(it->second.min_dist, dist[order[i]]);
    }
    std::vector<std::pair<std::string, Group>> voted(groups.begin(), groups.end());
    std::sort(voted.begin(), voted.end(), [](const auto& a, const auto& b) {
        if (a.second.votes != b.second.votes) return a.second.votes > b.second.votes;
        if (a.second.min_dist != b.second.min_dist) return a.second.min_dist < b.second.min_dist;
        return a.first < b.first;
    });

    RankedList list;
    list.query_id = query_id;
    list.measure = measure;
    std::vector<bool> emitted(corpus.size(), false);
    for (const auto& [label, group] : voted) {
        for (size_t idx : order) {
            if (!emitted[idx] && corpus[idx].label == label) {
                list.entries.push_back({corpus[idx].song_id, dist[idx]});
                emitted[idx] = true;
            }
        }
    }
    for (size_t idx : order) {
        if (!emitted[idx]) {
            list.entries.push_back({corpus[idx].song_id, dist[idx]});
            emitted[idx] = true;
        }
    }
    return list;
}

RankedList rank(const FeatureSequence& query, const std::string& query_id,
                const std::vector<CorpusEntry>& corpus, const DistanceMeasure& measure) {
    if (measure.kind == MeasureKind::KNN) return knn_rank(query, query_id, corpus, measure);
    return rank_all(query, query_id, corpus, measure);
}

}  // namespace qbh
