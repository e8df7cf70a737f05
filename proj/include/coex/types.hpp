#pragma once
#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "coex/errors.hpp"

namespace coex {

// Contention window parameters of one access class. cw_min/cw_max are window
// sizes in slots (the draw range of stage j is [0, W_j - 1]); aifs is the
// idle-slot countdown preceding backoff decrements; retry_limit_L is the
// highest backoff stage index (L), so a frame makes at most L+1 attempts.
struct EdcaClass {
    int cw_min = 16;
    int cw_max = 1024;
    int aifs = 3;
    int retry_limit_L = 6;

    void validate(const std::string& where = "edca") const {
        if (cw_min < 1) throw InvalidParameter(where + ".cw_min must be >= 1");
        if (cw_max < cw_min) throw InvalidParameter(where + ".cw_max must be >= cw_min");
        if (aifs < 0) throw InvalidParameter(where + ".aifs must be >= 0");
        if (retry_limit_L < 0) throw InvalidParameter(where + ".retry_limit_L must be >= 0");
        // window doubling must land exactly on cw_max for some stage <= L
        int w = cw_min;
        bool ok = false;
        for (int k = 0; k <= retry_limit_L && !ok; ++k) {
            if (w == cw_max) ok = true;
            if (w > (1 << 28)) break;
            w *= 2;
        }
        if (!ok && cw_max != cw_min)
            throw InvalidParameter(where + ".cw_max must equal cw_min*2^k for some k <= retry_limit_L");
    }

    // Window size of backoff stage j: doubling capped at cw_max.
    int window(int stage) const {
        long long w = static_cast<long long>(cw_min) << std::min(stage, 30);
        return static_cast<int>(std::min<long long>(w, cw_max));
    }
};

// Named access classes (window sizes, i.e. CW+1 relative to tabulated CW).
inline EdcaClass edca_vo() { return EdcaClass{4, 8, 2, 6}; }
inline EdcaClass edca_vi() { return EdcaClass{8, 16, 2, 6}; }
inline EdcaClass edca_be() { return EdcaClass{16, 1024, 3, 6}; }
inline EdcaClass edca_bk() { return EdcaClass{16, 1024, 7, 6}; }

inline EdcaClass edca_by_name(const std::string& name) {
    if (name == "VO" || name == "vo") return edca_vo();
    if (name == "VI" || name == "vi") return edca_vi();
    if (name == "BE" || name == "be") return edca_be();
    if (name == "BK" || name == "bk") return edca_bk();
    throw InvalidParameter("unknown access class '" + name + "' (use VO, VI, BE, BK)");
}

// Shared MAC/PHY timing constants. Durations in microseconds, rates in
// bits per microsecond (numerically equal to Mbit/s).
struct MacTiming {
    double sigma = 9.0;
    double sifs = 16.0;
    double difs = 34.0;
    double phy_header = 20.0;
    double ack_bits = 112.0;
    double rate_R = 160.0;
    double rate_Rmin = 6.0;
    double txop_limit = 5484.0;

    void validate() const {
        if (sigma <= 0) throw InvalidParameter("timing.sigma must be > 0");
        if (sifs <= 0) throw InvalidParameter("timing.sifs must be > 0");
        if (difs <= 0) throw InvalidParameter("timing.difs must be > 0");
        if (phy_header <= 0) throw InvalidParameter("timing.phy_header must be > 0");
        if (ack_bits <= 0) throw InvalidParameter("timing.ack_bits must be > 0");
        if (rate_R <= 0) throw InvalidParameter("timing.rate_R must be > 0");
        if (rate_Rmin <= 0) throw InvalidParameter("timing.rate_Rmin must be > 0");
        if (txop_limit <= 0) throw InvalidParameter("timing.txop_limit must be > 0");
    }
};

// Parameters of one sensing measurement exchange. Frame airtimes in
// microseconds; n_sta_participants_N responders take part per session.
struct SensingProfile {
    int n_tx = 1;
    int n_rx = 1;
    int n_sc = 242;
    int n_b = 8;
    int n_sta_participants_N = 2;
    double t_polling = 100.0;
    double t_cts = 100.0;
    double t_ndpa = 100.0;
    double t_ndp = 100.0;
    bool report_phy_header = true;  // one preamble per report frame
    // Optional trigger-based uplink sounding phase appended to each session:
    // adds N * (t_tf + SIFS + t_ndp) when enabled.
    bool uplink_sounding = false;
    double t_tf = 100.0;

    void validate() const {
        if (n_tx < 1) throw InvalidParameter("sensing.n_tx must be >= 1");
        if (n_rx < 1) throw InvalidParameter("sensing.n_rx must be >= 1");
        if (n_sc < 1) throw InvalidParameter("sensing.n_sc must be >= 1");
        if (n_b < 1) throw InvalidParameter("sensing.n_b must be >= 1");
        if (n_sta_participants_N < 1)
            throw InvalidParameter("sensing.n_sta_participants must be >= 1");
        if (t_polling <= 0 || t_cts <= 0 || t_ndpa <= 0 || t_ndp <= 0)
            throw InvalidParameter("sensing frame times must be > 0");
        if (t_tf <= 0) throw InvalidParameter("sensing.t_tf must be > 0");
    }
};

// Station populations and their access classes.
struct PopulationMix {
    int n_bf_aps = 1;
    int n_ax_aps = 1;
    int stas_per_bf = 2;
    int stas_per_ax = 1;
    EdcaClass edca_bf = edca_be();
    EdcaClass edca_ax = edca_be();

    void validate() const {
        if (n_bf_aps < 0) throw InvalidParameter("population.n_bf_aps must be >= 0");
        if (n_ax_aps < 0) throw InvalidParameter("population.n_ax_aps must be >= 0");
        if (n_bf_aps + n_ax_aps < 1)
            throw InvalidParameter("population must contain at least one AP");
        if (stas_per_bf < 1) throw InvalidParameter("population.stas_per_bf must be >= 1");
        if (stas_per_ax < 1) throw InvalidParameter("population.stas_per_ax must be >= 1");
        edca_bf.validate("population.edca_bf");
        edca_ax.validate("population.edca_ax");
    }
};

// Downlink data traffic shape for one data AP.
struct AxTrafficProfile {
    int msdu_bits = 1474 * 8;
    int mac_header_bits = 36 * 8;
    int ampdu_count = 64;

    void validate() const {
        if (msdu_bits < 1) throw InvalidParameter("traffic.msdu_bits must be >= 1");
        if (mac_header_bits < 1) throw InvalidParameter("traffic.mac_header_bits must be >= 1");
        if (ampdu_count < 1) throw InvalidParameter("traffic.ampdu_count must be >= 1");
    }
};

// All MAC-event durations (microseconds) derived from one configuration.
struct DurationTable {
    double t_f_ax = 0;     // data frame airtime (preamble + aggregate)
    double t_f_bf = 0;     // full sensing session span (the contention-free period)
    double t_s_ax = 0;     // successful data event span
    double t_s_bf = 0;     // successful sensing event span
    double t_c_ax = 0;     // data-only collision span
    double t_c_bf = 0;     // sensing collision span
    double t_c_cross = 0;  // cross-technology collision span
    double sigma = 9.0;    // idle slot
    int ax_mpdu_effective = 0;  // MPDUs per data frame after TXOP clipping
};

enum class ArrivalMode { continuous, periodic, poisson };

inline std::string to_string(ArrivalMode m) {
    switch (m) {
        case ArrivalMode::continuous: return "continuous";
        case ArrivalMode::periodic: return "periodic";
        case ArrivalMode::poisson: return "poisson";
    }
    return "?";
}

enum class RunMode { analytic, sim, both };

inline std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::analytic: return "analytic";
        case RunMode::sim: return "sim";
        case RunMode::both: return "both";
    }
    return "?";
}

// Complete experiment description shared by both engines.
struct ScenarioConfig {
    PopulationMix population;
    MacTiming timing;
    AxTrafficProfile traffic;
    SensingProfile sensing;
    ArrivalMode arrival_mode = ArrivalMode::periodic;
    double interval_us = 100e3;     // periodic spacing, or 1/rate for poisson
    double startup_jitter_us = 0.0; // sensing epoch offset drawn from [0, jitter)
    double duration_s = 10.0;
    std::vector<std::uint64_t> seeds = default_seeds();
    RunMode mode = RunMode::both;

    static std::vector<std::uint64_t> default_seeds() {
        std::vector<std::uint64_t> s(50);
        for (int i = 0; i < 50; ++i) s[static_cast<size_t>(i)] = static_cast<std::uint64_t>(i + 1);
        return s;
    }

    void validate() const {
        population.validate();
        timing.validate();
        traffic.validate();
        sensing.validate();
        if (interval_us <= 0) throw InvalidParameter("interval must be > 0");
        if (startup_jitter_us < 0) throw InvalidParameter("startup_jitter must be >= 0");
        if (duration_s <= 0) throw InvalidParameter("duration must be > 0");
        if (mode != RunMode::analytic && seeds.empty())
            throw InvalidParameter("seed list must be non-empty in simulation modes");
    }
};

}  // namespace coex
