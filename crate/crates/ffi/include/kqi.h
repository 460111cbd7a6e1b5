#ifndef KQI_H
#define KQI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Attachment weight used by the simulator.
 */
typedef enum KqiKernel {
  KQI_KERNEL_CITATIONS = 0,
  KQI_KERNEL_TOTAL_DEGREE = 1,
} KqiKernel;

typedef enum KqiStatus {
  KQI_STATUS_OK = 0,
  KQI_STATUS_NULL_POINTER = 1,
  KQI_STATUS_INVALID_ARGUMENT = 2,
  KQI_STATUS_IO = 3,
  KQI_STATUS_MALFORMED = 4,
  KQI_STATUS_CYCLE = 5,
  KQI_STATUS_INVALID_GRAPH = 6,
  KQI_STATUS_WRONG_STATE = 7,
  KQI_STATUS_UNKNOWN_NODE = 8,
  KQI_STATUS_DOMAIN = 9,
  KQI_STATUS_PANIC = 10,
} KqiStatus;

/**
 * Opaque citation graph.
 */
typedef struct KqiGraph KqiGraph;

/**
 * Opaque per-node KQI and volume table, indexed like its graph.
 */
typedef struct KqiScores KqiScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *kqi_last_error_message(void);

/**
 * Loads a graph from an edge file and an optional (nullable) node file.
 *
 * # Safety
 * Paths must be null or valid NUL-terminated strings; `out` must be writable.
 */
enum KqiStatus kqi_graph_load(const char *edge_path, const char *node_path, struct KqiGraph **out);

/**
 * Writes the graph (super root excluded) to an edge file and a node file.
 *
 * # Safety
 * `g` must be a live handle; paths must be valid NUL-terminated strings.
 */
enum KqiStatus kqi_graph_export(const struct KqiGraph *g,
                                const char *edge_path,
                                const char *node_path);

/**
 * Adds the super root in place. `count_root_weight` controls whether its
 * edges count toward the total weight.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum KqiStatus kqi_graph_augment(struct KqiGraph *g, bool count_root_weight);

/**
 * Reweights edges in place by `exp(-lambda * (reference_year - year(citing)))`.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum KqiStatus kqi_graph_decay(struct KqiGraph *g, double lambda, int32_t reference_year);

/**
 * Keeps only papers published up to `year`, in place.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum KqiStatus kqi_graph_snapshot(struct KqiGraph *g, int32_t year);

/**
 * Node count, including the super root when present.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum KqiStatus kqi_graph_node_count(const struct KqiGraph *g, size_t *out);

/**
 * Edge count, including super-root edges when present.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum KqiStatus kqi_graph_edge_count(const struct KqiGraph *g, size_t *out);

/**
 * Index of a node id.
 *
 * # Safety
 * `g` must be a live handle; `id` a valid NUL-terminated string; `out` writable.
 */
enum KqiStatus kqi_graph_index_of(const struct KqiGraph *g, const char *id, size_t *out);

/**
 * Copies the id of node `index` into `buf` (NUL-terminated, truncated to
 * `len`). `needed`, if non-null, receives the full length plus one.
 *
 * # Safety
 * `g` must be a live handle; `buf` must have room for `len` bytes.
 */
enum KqiStatus kqi_graph_node_id(const struct KqiGraph *g,
                                 size_t index,
                                 char *buf,
                                 size_t len,
                                 size_t *needed);

/**
 * Computes volumes and KQI for an augmented graph.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum KqiStatus kqi_compute(const struct KqiGraph *g, struct KqiScores **out);

/**
 * Number of entries; equals the graph's node count.
 *
 * # Safety
 * `t` must be null or a live handle.
 */
size_t kqi_scores_len(const struct KqiScores *t);

/**
 * KQI and volume of node `index`; either output may be null.
 *
 * # Safety
 * `t` must be a live handle.
 */
enum KqiStatus kqi_scores_get(const struct KqiScores *t, size_t index, double *kqi, double *volume);

/**
 * Total KQI over real nodes and the total edge weight used.
 *
 * # Safety
 * `t` must be a live handle; outputs may be null.
 */
enum KqiStatus kqi_scores_totals(const struct KqiScores *t,
                                 double *total_kqi,
                                 double *total_weight);

/**
 * Copies up to `len` KQI values into `buf`; returns the count copied.
 *
 * # Safety
 * `t` must be a live handle; `buf` must have room for `len` doubles.
 */
size_t kqi_scores_copy(const struct KqiScores *t, double *buf, size_t len);

/**
 * Preferential-attachment graph under the standard schedule, sized to
 * about `total` nodes after `steps` steps.
 *
 * # Safety
 * `out` must be writable.
 */
enum KqiStatus kqi_generate_ba_standard(size_t m,
                                        uint32_t steps,
                                        double total,
                                        uint64_t seed,
                                        enum KqiKernel kernel_kind,
                                        struct KqiGraph **out);

/**
 * Preferential-attachment graph with explicit per-step arrivals.
 *
 * # Safety
 * `arrivals` must point to `steps` integers; `out` must be writable.
 */
enum KqiStatus kqi_generate_ba_custom(size_t m,
                                      const uint64_t *arrivals,
                                      uint32_t steps,
                                      uint64_t seed,
                                      enum KqiKernel kernel_kind,
                                      struct KqiGraph **out);

/**
 * Bootstrap percolation; either output may be null.
 *
 * # Safety
 * `g` must be a live handle.
 */
enum KqiStatus kqi_percolate(const struct KqiGraph *g,
                             uint32_t a,
                             double seed_fraction,
                             uint64_t rng_seed,
                             double *active_fraction,
                             size_t *rounds);

/**
 * Releases a graph handle; null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void kqi_graph_free(struct KqiGraph *g);

/**
 * Releases a score handle; null is ignored.
 *
 * # Safety
 * `t` must be null or a handle not yet freed.
 */
void kqi_scores_free(struct KqiScores *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KQI_H */
