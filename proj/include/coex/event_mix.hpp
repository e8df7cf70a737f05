#pragma once
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "coex/durations.hpp"
#include "coex/fixed_point.hpp"
#include "coex/types.hpp"

namespace coex {

inline double binom_pmf(int n, int k, double p) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// Mean duration of one channel slot-event: the probability-weighted sum of
// the nine disjoint outcomes (idle; per-technology success/collision alone;
// the four joint-activity combinations, all spanning the cross-collision
// duration).
struct EventTerms {
    std::array<double, 9> weight{};
    std::array<double, 9> span{};
    double mean = 0;
};

inline EventTerms mean_event_time_terms(const FixedPointSolution& s, const DurationTable& d) {
    const double qa = 1.0 - s.p_t_ax, qb = 1.0 - s.p_t_bf;
    const double sa = s.p_t_ax * s.p_s_ax, sb = s.p_t_bf * s.p_s_bf;
    // p_s can round a hair past 1 for a lone population; the collision
    // complement must stay a probability.
    const double ca = std::max(0.0, s.p_t_ax * (1.0 - s.p_s_ax));
    const double cb = std::max(0.0, s.p_t_bf * (1.0 - s.p_s_bf));
    EventTerms t;
    t.weight = {qa * qb, sa * qb, sb * qa, ca * qb, cb * qa,
                sa * sb, sa * cb, ca * sb, ca * cb};
    t.span = {d.sigma, d.t_s_ax, d.t_s_bf, d.t_c_ax, d.t_c_bf,
              d.t_c_cross, d.t_c_cross, d.t_c_cross, d.t_c_cross};
    for (int i = 0; i < 9; ++i) t.mean += t.weight[static_cast<size_t>(i)] * t.span[static_cast<size_t>(i)];
    return t;
}

inline double mean_event_time(const FixedPointSolution& s, const DurationTable& d) {
    return mean_event_time_terms(s, d).mean;
}

struct AxThroughput {
    double normalized = 0;     // airtime share of successful data frames
    double aggregate_bps = 0;  // delivered payload bits per second, all data APs
};

// Channel share and goodput of the data population.
inline AxThroughput ax_throughput(const FixedPointSolution& s, const DurationTable& d,
                                  const AxTrafficProfile& traffic) {
    const double tm = mean_event_time(s, d);
    const double p_succ = s.p_t_ax * s.p_s_ax * (1.0 - s.p_t_bf);
    AxThroughput out;
    out.normalized = p_succ * d.t_f_ax / tm;
    const double payload_bits = static_cast<double>(d.ax_mpdu_effective) * traffic.msdu_bits;
    out.aggregate_bps = p_succ * payload_bits / tm * 1e6;  // tm is in microseconds
    return out;
}

// Exact per-slot event mix by transmitter counts: probability and span of
// each (k_bf, k_ax) outcome among nbf sensing + nax data stations attempting
// independently with the given probabilities.
struct SlotEventMix {
    struct Entry {
        int k_bf, k_ax;
        double prob, span;
    };
    std::vector<Entry> entries;
    double p_idle = 0, p_success_bf = 0, p_success_ax = 0;
    double mean_span = 0;
    double mean_square_span = 0;
};

inline SlotEventMix slot_event_mix(int nbf, int nax, double tau_bf, double tau_ax,
                                   const DurationTable& d) {
    SlotEventMix m;
    for (int kb = 0; kb <= nbf; ++kb) {
        for (int ka = 0; ka <= nax; ++ka) {
            const double q = binom_pmf(nbf, kb, tau_bf) * binom_pmf(nax, ka, tau_ax);
            if (q <= 0.0) continue;
            double span;
            if (kb + ka == 0) {
                span = d.sigma;
                m.p_idle += q;
            } else if (kb == 1 && ka == 0) {
                span = d.t_s_bf;
                m.p_success_bf += q;
            } else if (kb == 0 && ka == 1) {
                span = d.t_s_ax;
                m.p_success_ax += q;
            } else if (ka == 0) {
                span = d.t_c_bf;
            } else if (kb == 0) {
                span = d.t_c_ax;
            } else {
                span = d.t_c_cross;
            }
            m.entries.push_back({kb, ka, q, span});
            m.mean_span += q * span;
            m.mean_square_span += q * span * span;
        }
    }
    return m;
}

}  // namespace coex
