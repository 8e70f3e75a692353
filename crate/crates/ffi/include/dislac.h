#ifndef DISLAC_H
#define DISLAC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DislacStatus {
  DISLAC_STATUS_OK = 0,
  DISLAC_STATUS_NULL_POINTER = 1,
  DISLAC_STATUS_INVALID_ARGUMENT = 2,
  DISLAC_STATUS_INVALID_UTF8 = 3,
  /**
   * A computation or run failed; see `dislac_last_error`.
   */
  DISLAC_STATUS_FAILED = 4,
  DISLAC_STATUS_BUFFER_TOO_SMALL = 5,
  DISLAC_STATUS_PANIC = 6,
} DislacStatus;

typedef enum DislacTopology {
  DISLAC_TOPOLOGY_RING = 0,
  DISLAC_TOPOLOGY_STAR = 1,
} DislacTopology;

typedef enum DislacRole {
  DISLAC_ROLE_EDGE = 0,
  DISLAC_ROLE_CENTRAL = 1,
} DislacRole;

/**
 * Sampled constellation above one ground terminal.
 */
typedef struct DislacConstellation DislacConstellation;

/**
 * Result of an experiment run.
 */
typedef struct DislacRun DislacRun;

/**
 * OFDM numerology. Units: Hz, seconds.
 */
typedef struct DislacOfdmConfig {
  double delta_f;
  uint64_t n_subcarriers;
  uint64_t n_symbols;
  double t_pri;
  double fc;
  double cp;
  double scs;
} DislacOfdmConfig;

/**
 * `r_max`, `delta_r` in km; `v_max` in km/s; `delta_v` in m/s.
 */
typedef struct DislacRadarMetrics {
  double r_max;
  double delta_r;
  double v_max;
  double delta_v;
} DislacRadarMetrics;

typedef struct DislacWaveformBounds {
  /**
   * Hz
   */
  double delta_f_max;
  /**
   * s
   */
  double t_pri_max;
} DislacWaveformBounds;

/**
 * One satellite of a sampled constellation.
 */
typedef struct DislacProfileRow {
  uint32_t sat_id;
  double zenith_deg;
  double differential_delay_us;
  double doppler_hz;
  bool delay_ok;
  bool doppler_ok;
} DislacProfileRow;

/**
 * Description of the last failure on this thread, or NULL after a
 * success. Valid until the next call into the library on this thread.
 */
const char *dislac_last_error(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *dislac_version(void);

/**
 * # Safety
 * `config` must point to a valid config and `out` to writable memory.
 */
enum DislacStatus dislac_radar_metrics(const struct DislacOfdmConfig *config,
                                       struct DislacRadarMetrics *out);

/**
 * Largest subband spacing and Doppler interval for the unambiguous range
 * (km) and velocity (km/s) targets at carrier `fc` (Hz).
 *
 * # Safety
 * `out` must point to writable memory.
 */
enum DislacStatus dislac_required_config(double r_max_km,
                                         double v_max_km_s,
                                         double fc,
                                         struct DislacWaveformBounds *out);

/**
 * Reference signaling overhead per node.
 *
 * # Safety
 * `out` must point to writable memory.
 */
enum DislacStatus dislac_overhead_model(enum DislacTopology topology,
                                        enum DislacRole role,
                                        uint64_t n_sats,
                                        uint64_t n_users,
                                        uint64_t *out);

/**
 * # Safety
 * `label` must be a NUL-terminated UTF-8 string and `out` writable.
 */
enum DislacStatus dislac_derive_seed(uint64_t master,
                                     const char *label,
                                     uint64_t index,
                                     uint64_t *out);

/**
 * Slant range (km) at `zenith_deg` to a shell at `altitude` km.
 *
 * # Safety
 * `out` must point to writable memory.
 */
enum DislacStatus dislac_slant_range(double zenith_deg,
                                     double altitude,
                                     double earth_radius,
                                     double *out);

/**
 * Samples `count` satellites above a terminal at (`lat`, `lon`) degrees on
 * the standard Earth sphere.
 *
 * # Safety
 * `out` must point to writable memory. The handle written there must be
 * released with `dislac_constellation_free`.
 */
enum DislacStatus dislac_constellation_new(uint64_t count,
                                           double altitude,
                                           double speed,
                                           double zenith_min,
                                           double zenith_max,
                                           uint64_t seed,
                                           double lat,
                                           double lon,
                                           struct DislacConstellation **out);

/**
 * Number of satellites, 0 for NULL.
 *
 * # Safety
 * `handle` must be NULL or a live constellation handle.
 */
size_t dislac_constellation_len(const struct DislacConstellation *handle);

/**
 * Writes one row per satellite into `rows` (capacity `capacity`) and the
 * row count into `written`. Fails with `BufferTooSmall` (and the needed
 * count in `written`) when the buffer is short.
 *
 * # Safety
 * `handle` must be live, `rows` must have room for `capacity` rows and
 * `written` must be writable.
 */
enum DislacStatus dislac_constellation_profile(const struct DislacConstellation *handle,
                                               double fc,
                                               double cp,
                                               double scs,
                                               double doppler_factor,
                                               struct DislacProfileRow *rows,
                                               size_t capacity,
                                               size_t *written);

/**
 * # Safety
 * `handle` must be NULL or a handle from `dislac_constellation_new` not
 * yet freed.
 */
void dislac_constellation_free(struct DislacConstellation *handle);

/**
 * Runs the experiment described by a TOML or JSON config document (a run
 * manifest also works). `output_dir` overrides the config's output
 * directory when not NULL.
 *
 * # Safety
 * `config` must be a NUL-terminated UTF-8 string, `output_dir` NULL or
 * one, and `out` writable. Release the handle with `dislac_run_free`.
 */
enum DislacStatus dislac_run(const char *config, const char *output_dir, struct DislacRun **out);

/**
 * Path of the written manifest; owned by the handle.
 *
 * # Safety
 * `handle` must be NULL or live.
 */
const char *dislac_run_manifest_path(const struct DislacRun *handle);

/**
 * # Safety
 * `handle` must be NULL or live.
 */
size_t dislac_run_artifact_count(const struct DislacRun *handle);

/**
 * Path of artifact `index`, NULL when out of range; owned by the handle.
 *
 * # Safety
 * `handle` must be NULL or live.
 */
const char *dislac_run_artifact_path(const struct DislacRun *handle, size_t index);

/**
 * Wall-clock duration in seconds, NaN for NULL.
 *
 * # Safety
 * `handle` must be NULL or live.
 */
double dislac_run_duration(const struct DislacRun *handle);

/**
 * # Safety
 * `handle` must be NULL or a handle from `dislac_run` not yet freed.
 */
void dislac_run_free(struct DislacRun *handle);

#endif  /* DISLAC_H */
