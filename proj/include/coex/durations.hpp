#pragma once
#include <algorithm>
#include <cstdint>

#include "coex/types.hpp"

namespace coex {

// Size of one channel-state feedback report in octets:
// ceil(1.5*n_tx*n_rx) + ceil(n_tx*n_rx*n_b*n_sc / 4) + 2*n_tx.
inline std::int64_t csi_report_size(int n_tx, int n_rx, int n_b, int n_sc) {
    if (n_tx < 1 || n_rx < 1 || n_b < 1 || n_sc < 1)
        throw InvalidParameter("csi_report_size: all inputs must be >= 1");
    const std::int64_t pairs = static_cast<std::int64_t>(n_tx) * n_rx;
    const std::int64_t angle = (3 * pairs + 1) / 2;                        // ceil(1.5*pairs)
    const std::int64_t body = (pairs * n_b * n_sc + 3) / 4;                // ceil(bits/4)
    return angle + body + 2 * n_tx;
}

// Airtime of one feedback report frame: payload at rate_R plus one preamble.
inline double reporting_duration(std::int64_t csi_octets, double rate_R,
                                 double phy_header = 20.0, bool with_header = true) {
    if (csi_octets < 0) throw InvalidParameter("reporting_duration: csi_octets must be >= 0");
    if (rate_R <= 0) throw InvalidParameter("reporting_duration: rate_R must be > 0");
    return 8.0 * static_cast<double>(csi_octets) / rate_R + (with_header ? phy_header : 0.0);
}

// Full sensing session span: polling + CTS + per-responder sounding + reporting.
inline double cfp_duration(const SensingProfile& p, const MacTiming& t, double rate_R) {
    p.validate();
    if (rate_R <= 0) throw InvalidParameter("cfp_duration: rate_R must be > 0");
    const double t_rep = reporting_duration(
        csi_report_size(p.n_tx, p.n_rx, p.n_b, p.n_sc), rate_R, t.phy_header,
        p.report_phy_header);
    const double n = static_cast<double>(p.n_sta_participants_N);
    return p.t_polling + t.sifs + p.t_cts + t.sifs +
           n * (p.t_ndpa + t.sifs + p.t_ndp) + t.sifs + n * t_rep +
           (p.uplink_sounding ? n * (p.t_tf + t.sifs + p.t_ndp) : 0.0);
}

struct AxFrame {
    double duration_us = 0;
    int mpdu_count = 0;
};

// Aggregate data frame airtime, clipped to the TXOP limit by shrinking the
// aggregate. A single MPDU that cannot fit is rejected.
inline AxFrame ax_frame_duration(const AxTrafficProfile& tr, const MacTiming& t) {
    tr.validate();
    t.validate();
    const double per_mpdu = static_cast<double>(tr.mac_header_bits + tr.msdu_bits) / t.rate_R;
    int n = std::min<int>(tr.ampdu_count,
                          static_cast<int>((t.txop_limit - t.phy_header) / per_mpdu));
    if (n < 1)
        throw InvalidParameter("ax_frame_duration: a single MPDU exceeds the TXOP limit");
    return AxFrame{t.phy_header + n * per_mpdu, n};
}

// All MAC-event durations for a scenario.
inline DurationTable event_durations(const ScenarioConfig& cfg) {
    const MacTiming& t = cfg.timing;
    const AxFrame f = ax_frame_duration(cfg.traffic, t);
    DurationTable d;
    d.sigma = t.sigma;
    d.t_f_ax = f.duration_us;
    d.ax_mpdu_effective = f.mpdu_count;
    d.t_f_bf = cfp_duration(cfg.sensing, t, t.rate_R);
    d.t_s_ax = d.t_f_ax + t.difs + t.sifs + t.phy_header + t.ack_bits / t.rate_Rmin;
    d.t_s_bf = d.t_f_bf + t.difs;
    d.t_c_ax = d.t_f_ax + t.difs;
    d.t_c_bf = d.t_f_bf + t.difs;
    d.t_c_cross = std::max(d.t_c_ax, d.t_c_bf);
    return d;
}

}  // namespace coex
