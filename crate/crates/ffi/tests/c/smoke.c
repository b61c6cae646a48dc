#include <math.h>
#include <stdio.h>
#include "noma_sat.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, ns_last_error()); return 1; } } while (0)

int main(void) {
    double r = 0.0;
    CHECK(ns_rate_ian(3.0, 0.0, &r) == NS_STATUS_OK);
    CHECK(fabs(r - 2.0) < 1e-12);
    CHECK(ns_rate_ian(-1.0, 0.0, &r) == NS_STATUS_INVALID_ARGUMENT);

    NsRegion *reg = NULL;
    CHECK(ns_region_two_user(10.0, 10.0, 1.0, 1.0, NS_MODE_SND, &reg) == NS_STATUS_OK);
    CHECK(ns_region_len(reg) > 0);
    double sum = 0.0;
    CHECK(ns_region_max_sum(reg, &sum) == NS_STATUS_OK);
    CHECK(sum > 0.0);
    ns_region_free(reg);

    double hz = 0.0;
    CHECK(ns_feeder_bandwidth(NS_FEEDER_BROADCAST_MULTICAST, 2, 1.0, &hz) == NS_STATUS_OK);
    CHECK(hz == 6.0);

    NsSimConfig *cfg = NULL;
    CHECK(ns_sim_config_from_toml("k = 1\nn = 1\ndrops = 2\nschemes = [\"four_color\"]", &cfg) == NS_STATUS_OK);
    NsSummary *s = NULL;
    CHECK(ns_compare_schemes(cfg, &s) == NS_STATUS_OK);
    CHECK(ns_summary_len(s) == 1);
    NsSummaryRow row;
    CHECK(ns_summary_row(s, 0, &row) == NS_STATUS_OK);
    CHECK(row.scheme == NS_SCHEME_FOUR_COLOR && row.scheduler == NS_SCHEDULER_NONE && row.drops == 2);
    ns_summary_free(s);
    ns_sim_config_free(cfg);
    puts("ok");
    return 0;
}
