/* Query-by-singing/humming retrieval engine: C API.
 *
 * All functions return a qbh_status; on failure the message is available
 * from qbh_last_error() (thread-local). Handles are opaque and must be
 * released with the matching free/close call.
 */
#ifndef QBH_H
#define QBH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QBH_API __declspec(dllexport)
#else
#define QBH_API __attribute__((visibility("default")))
#endif

typedef enum qbh_status {
    QBH_OK = 0,
    QBH_ERR_USAGE = 1,    /* bad arguments or unsupported request */
    QBH_ERR_DATA = 2,     /* malformed input, missing data, store corruption */
    QBH_ERR_INTERNAL = 3
} qbh_status;

QBH_API const char* qbh_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
QBH_API const char* qbh_last_error(void);

/* ---- store ---- */

typedef struct qbh_store qbh_store;

QBH_API qbh_status qbh_store_open(const char* directory, qbh_store** out);
QBH_API void qbh_store_close(qbh_store* store);
QBH_API int qbh_store_song_count(const qbh_store* store);

/* Store summary (format version, config, per-song frame counts) as a
 * malloc'd JSON string; release with qbh_string_free. */
QBH_API qbh_status qbh_store_info_json(const qbh_store* store, char** json_out);
QBH_API void qbh_string_free(char* s);

/* ---- ingestion ---- */

typedef struct qbh_ingest_item {
    const char* wav_path;
    const char* song_id;
    const char* title;
} qbh_ingest_item;

/* Creates or extends the store at `directory` with the given songs.
 * The update is atomic: on any failure the directory is left unchanged. */
QBH_API qbh_status qbh_ingest(const char* directory, const qbh_ingest_item* items, size_t count);

/* ---- query ---- */

typedef struct qbh_result qbh_result;

/* feature: "MFCC" | "LPC" | "LPCC"; measure: "ED" | "KNN" | "DTW". */
QBH_API qbh_status qbh_query(const qbh_store* store, const char* query_wav_path,
                             const char* feature, const char* measure, qbh_result** out);
QBH_API size_t qbh_result_count(const qbh_result* result);
QBH_API const char* qbh_result_song_id(const qbh_result* result, size_t index);
QBH_API const char* qbh_result_title(const qbh_result* result, size_t index);
QBH_API double qbh_result_distance(const qbh_result* result, size_t index);
QBH_API void qbh_result_free(qbh_result* result);

/* ---- evaluation ---- */

typedef struct qbh_eval_options {
    const char* features_csv;  /* e.g. "MFCC,LPC,LPCC"; NULL = all three */
    const char* measures_csv;  /* e.g. "ED,KNN,DTW"; NULL = all three */
    const char* excerpts_csv;  /* e.g. "60,70,80,90,100"; NULL = that default */
    const char* db_sizes_csv;  /* e.g. "50,200"; NULL = full store size */
    uint64_t seed;
} qbh_eval_options;

/* query_manifest: CSV lines "query_wav_path,target_song_id".
 * Writes the report CSV to out_csv_path and returns a malloc'd copy of
 * the CSV text in csv_out when non-NULL (release with qbh_string_free). */
QBH_API qbh_status qbh_evaluate(const qbh_store* store, const char* query_manifest_path,
                                const qbh_eval_options* options, const char* out_csv_path,
                                char** csv_out);

/* ---- synthetic corpus ---- */

QBH_API qbh_status qbh_synth_corpus(const char* out_dir, int num_songs, double seconds,
                                    double tempo_jitter_pct, double noise_snr_db,
                                    uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* QBH_H */
