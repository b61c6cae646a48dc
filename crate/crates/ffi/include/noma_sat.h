#ifndef NOMA_SAT_H
#define NOMA_SAT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define NS_MODE_IAN 0

#define NS_MODE_SD 1

#define NS_MODE_SND 2

#define NS_FEEDER_SINGLE_LAYER 0

#define NS_FEEDER_LDM 1

#define NS_FEEDER_BROADCAST_MULTICAST 2

#define NS_SCHEME_FOUR_COLOR 0

#define NS_SCHEME_SINGLE_LAYER_PRECODING 1

#define NS_SCHEME_MULTILAYER_NOMA 2

#define NS_SCHEME_BROADCAST_MULTICAST 3

// Scheduler code of rows whose scheme uses none.
#define NS_SCHEDULER_NONE -1

typedef enum NsStatus {
  NS_STATUS_OK = 0,
  NS_STATUS_INVALID_ARGUMENT = 1,
  NS_STATUS_SINGULAR_CHANNEL = 2,
  NS_STATUS_INSUFFICIENT_USERS = 3,
  NS_STATUS_SIZE_LIMIT = 4,
  NS_STATUS_CONFIG = 5,
  NS_STATUS_IO = 6,
  NS_STATUS_NULL_POINTER = 7,
  NS_STATUS_PANIC = 8,
} NsStatus;

// Rate region (opaque).
typedef struct NsRegion NsRegion;

// Simulation configuration (opaque).
typedef struct NsSimConfig NsSimConfig;

// Result of [`ns_compare_schemes`] (opaque).
typedef struct NsSummary NsSummary;

// One aggregated scheme/scheduler row. `gain_vs_four_color_pct` is NaN when
// the baseline was not simulated.
typedef struct NsSummaryRow {
  uint32_t scheme;
  // Index into `min_gain_diff, max_gain_diff, collinear_min_gain, random`,
  // or `NS_SCHEDULER_NONE`.
  int32_t scheduler;
  uint64_t drops;
  double mean_bps;
  double median_bps;
  double p10_bps;
  double mean_jain;
  double gain_vs_four_color_pct;
} NsSummaryRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; valid until the next
// call into the library. Never null.
const char *ns_last_error(void);

// `log2(1 + snr / (1 + inr))`.
enum NsStatus ns_rate_ian(double snr, double inr, double *out_rate);

// Two-user region for `mode` (`NS_MODE_*`). Linear SNR/INR values.
enum NsStatus ns_region_two_user(double s1,
                                 double s2,
                                 double i1,
                                 double i2,
                                 uint32_t mode,
                                 struct NsRegion **out_region);

// Han–Kobayashi region over a power-split grid of the given step.
enum NsStatus ns_region_hk(double s1,
                           double s2,
                           double i1,
                           double i2,
                           double step,
                           struct NsRegion **out_region);

// Frequency-division region with power scaling over a time-share grid.
enum NsStatus ns_region_orthogonal(double s1,
                                   double s2,
                                   double i1,
                                   double i2,
                                   double step,
                                   struct NsRegion **out_region);

// Number of Pareto boundary points; 0 for a null handle.
size_t ns_region_len(const struct NsRegion *region);

// Boundary point `index`, ordered by increasing `r1`.
enum NsStatus ns_region_point(const struct NsRegion *region, size_t index, double *r1, double *r2);

enum NsStatus ns_region_max_sum(const struct NsRegion *region, double *out_sum);

enum NsStatus ns_region_contains(const struct NsRegion *region,
                                 double r1,
                                 double r2,
                                 double tol,
                                 bool *out_inside);

// Releases a region; null is ignored.
void ns_region_free(struct NsRegion *region);

// Feeder-link bandwidth in Hz for `scheme` (`NS_FEEDER_*`).
enum NsStatus ns_feeder_bandwidth(uint32_t scheme, uint64_t k, double b, double *out_hz);

// Jain's fairness index of `n` rates.
enum NsStatus ns_jain_fairness(const double *rates, size_t n, double *out_jain);

// Parses a TOML simulation configuration; absent keys take defaults.
enum NsStatus ns_sim_config_from_toml(const char *toml, struct NsSimConfig **out_config);

void ns_sim_config_free(struct NsSimConfig *config);

// Runs the Monte Carlo comparison.
enum NsStatus ns_compare_schemes(const struct NsSimConfig *config, struct NsSummary **out_summary);

size_t ns_summary_len(const struct NsSummary *summary);

// Drops skipped after repeated singular channels.
size_t ns_summary_skipped(const struct NsSummary *summary);

enum NsStatus ns_summary_row(const struct NsSummary *summary,
                             size_t index,
                             struct NsSummaryRow *out_row);

void ns_summary_free(struct NsSummary *summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NOMA_SAT_H */
