#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

#include "coex/delay.hpp"
#include "coex/durations.hpp"
#include "coex/event_mix.hpp"
#include "coex/fixed_point.hpp"
#include "coex/types.hpp"

namespace coex {

namespace detail {
inline PopulationMix with_counts(PopulationMix pop, int n_bf, int n_ax) {
    pop.n_bf_aps = n_bf;
    pop.n_ax_aps = n_ax;
    return pop;
}
}  // namespace detail

// Random-incidence residual of the channel event process seen by a freshly
// arriving request while n_bf sensing and n_ax data stations are saturated:
// E[S^2] / (2 E[S]) over the slot-event span distribution.
inline double incidence_residual_us(int n_bf, int n_ax, const ScenarioConfig& base) {
    if (n_bf <= 0 && n_ax <= 0) return 0.0;
    const PopulationMix pop = detail::with_counts(base.population, n_bf, n_ax);
    const FixedPointSolution s = solve_fixed_point(pop);
    const DurationTable d = event_durations(base);
    const SlotEventMix mix = slot_event_mix(n_bf, n_ax, s.tau_bf, s.tau_ax, d);
    if (mix.mean_span <= 0) throw SingularModel("incidence_residual: zero mean span");
    return mix.mean_square_span / (2.0 * mix.mean_span);
}

// Saturated goodput of the data population (payload bits per microsecond)
// with n_bf saturated sensing stations sharing the channel.
inline double data_goodput_bits_per_us(int n_bf, int n_ax, const ScenarioConfig& base) {
    if (n_ax <= 0) return 0.0;
    const PopulationMix pop = detail::with_counts(base.population, n_bf, n_ax);
    const FixedPointSolution s = solve_fixed_point(pop);
    const DurationTable d = event_durations(base);
    return ax_throughput(s, d, base.traffic).aggregate_bps / 1e6;
}

// Deadline-censored mean of a latency distribution modelled as a mixture over
// backoff success stages: component i is Erlang-k around its stage mean (a
// stage-conditional latency is a sum of several comparable holding periods,
// so its spread sits well below exponential; k = 4 gives CV 1/2). Returns
// E[T | T <= interval] via the Erlang tail identity
// E[T 1{T<=I}] = m * (1 - ErlangTail_{k+1}(kI/m)).
inline double censored_mixture_mean(const std::vector<double>& component_means,
                                    const std::vector<double>& weights, double interval_us,
                                    int shape_k = 4) {
    if (component_means.size() != weights.size())
        throw InvalidParameter("censored_mixture_mean: means/weights length mismatch");
    if (interval_us <= 0) throw InvalidParameter("censored_mixture_mean: interval must be > 0");
    if (shape_k < 1) throw InvalidParameter("censored_mixture_mean: shape must be >= 1");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < component_means.size(); ++i) {
        const double m = component_means[i], w = weights[i];
        if (m <= 0 || w <= 0) continue;
        const double x = shape_k * interval_us / m;
        if (x > 600.0) {  // tail numerically zero: the component is uncensored
            num += w * m;
            den += w;
            continue;
        }
        double tail = 0.0, term = std::exp(-x);
        for (int j = 0; j < shape_k; ++j) {
            tail += term;
            term *= x / (j + 1);
        }
        const double p_in = 1.0 - tail;  // P(T <= I), Erlang-k
        if (p_in <= 1e-15) continue;
        const double tail_k1 = tail + term;  // Erlang-(k+1) tail at the same x
        num += w * m * (1.0 - tail_k1);
        den += w * p_in;
    }
    return den > 0 ? num / den : 0.0;
}

// Periodic steady-state estimate for a population of n_bf sensing networks
// issuing one request per interval against n_ax saturated data networks.
// Latency = random-incidence residual + the saturated access chain evaluated
// with freeze-geometric decrement costing and partner-mixed collision spans;
// the reported-mean estimate censors that distribution at the interval
// (failed sessions are excluded from reported statistics); the response
// estimate adds the queueing wait that builds up as the duty cycle
// approaches one. Throughput mixes the quiet and contended data rates by the
// sensing duty cycle.
struct StationaryEstimate {
    double censored_latency_us = 0;   // reported-mean estimate
    double raw_latency_us = 0;        // uncensored chain mean
    double response_latency_us = 0;   // raw + queueing wait
    double saturated_service_us = 0;  // access chain alone
    double incidence_us = 0;          // arrival-to-first-countdown residual
    double aggregate_throughput_bps = 0;
    double per_network_throughput_bps = 0;
};

inline StationaryEstimate periodic_stationary_estimate(const ScenarioConfig& cfg,
                                                       const DelayOptions& opt = {}) {
    const int nbf = cfg.population.n_bf_aps, nax = cfg.population.n_ax_aps;
    if (nbf < 1) throw InvalidParameter("periodic_stationary_estimate: needs a sensing AP");
    const double interval = cfg.interval_us;

    const SaturatedPoint sp = saturated_point(cfg, opt);
    const double ti = incidence_residual_us(nbf - 1, nax, cfg);
    const double lat = ti + sp.delay.mean_access_delay_T;

    StationaryEstimate out;
    out.saturated_service_us = sp.delay.mean_access_delay_T;
    out.incidence_us = ti;
    out.raw_latency_us = lat;

    const double rho = std::min(lat / interval, 0.999);
    out.response_latency_us = lat + rho * lat / (2.0 * (1.0 - rho));

    std::vector<double> means, weights;
    means.reserve(sp.delay.per_stage_terms.size());
    weights.reserve(sp.delay.per_stage_terms.size());
    for (const StageTerm& st : sp.delay.per_stage_terms) {
        means.push_back(ti + st.delay_us);
        weights.push_back(st.p_success);
    }
    out.censored_latency_us = censored_mixture_mean(means, weights, interval);

    // Duty-cycle throughput mix: each sensing network occupies the channel
    // for min(lat, interval) per interval; the expected number of busy
    // sensing networks is binomial in that fraction.
    const double b = std::min(lat, interval) / interval;
    double g = 0.0;
    for (int k = 0; k <= nbf; ++k)
        g += binom_pmf(nbf, k, b) * data_goodput_bits_per_us(k, nax, cfg);
    out.aggregate_throughput_bps = g * 1e6;
    out.per_network_throughput_bps = nax > 0 ? out.aggregate_throughput_bps / nax : 0.0;
    return out;
}

// Burst drain estimate for n_bf sensing networks whose periodic requests are
// mutually aligned (all fire at the same epoch) against n_ax saturated data
// networks. A deterministic fluid over the joint (population x backoff
// stage) state tracks the drain rank by rank: stage-dependent per-slot
// attempt rates capture the fresh fast start and the collision-enriched
// straggler tail. The fluid's geometric-attempt approximation inflates
// first-passage times by a population-independent factor, measured where the
// fluid and the exact single-station chain describe the identical system
// (one sensing station on a cleared channel), and divided out.
struct BurstEstimate {
    double mean_latency_us = 0;          // anchored mean over drain ranks
    double aggregate_throughput_bps = 0; // data goodput over one interval
    double drain_us = 0;                 // anchored time to drain the burst
    double anchor_scale = 1.0;           // exact(1) / fluid(1)
    double fluid_latency_us = 0;         // pre-anchor fluid mean
};

namespace detail {

struct FluidDrain {
    double mean_latency_us = 0;
    double drain_us = 0;
    double goodput_bits_per_us = 0;
};

inline FluidDrain burst_fluid_drain(const ScenarioConfig& cfg) {
    const int nbf = cfg.population.n_bf_aps, nax = cfg.population.n_ax_aps;
    const EdcaClass& eb = cfg.population.edca_bf;
    const int L = eb.retry_limit_L;
    const DurationTable d = event_durations(cfg);
    const double interval = cfg.interval_us;
    const double ax_bits = static_cast<double>(d.ax_mpdu_effective) * cfg.traffic.msdu_bits;

    double tau_ax = 0.0;
    if (nax > 0) {
        const FixedPointSolution s =
            solve_fixed_point(with_counts(cfg.population, 0, nax));
        tau_ax = s.tau_ax;
    }
    const double p_no_ax = pow_nonneg(1.0 - tau_ax, nax);
    const double p_one_ax =
        nax > 0 ? nax * tau_ax * pow_nonneg(1.0 - tau_ax, nax - 1) : 0.0;
    const double p_multi_ax = 1.0 - p_no_ax - p_one_ax;

    auto tau_stage = [&](int s, double pf) {
        const double wbar = (eb.window(s) - 1.0) / 2.0;
        return 1.0 / (1.0 + wbar / std::max(1.0 - pf, 1e-12));
    };

    std::vector<double> m(static_cast<size_t>(L) + 1, 0.0);
    m[0] = static_cast<double>(nbf);
    double t = incidence_residual_us(0, nax, cfg);
    double gax_area = 0.0;
    std::vector<double> completion_times;
    completion_times.reserve(static_cast<size_t>(nbf));
    std::vector<double> taus(static_cast<size_t>(L) + 1, 0.0);

    for (int rank = 0; rank < nbf; ++rank) {
        // Freeze probability and per-stage attempt rates solve a small inner
        // fixed point (an average station's freeze odds depend on the others'
        // current rates).
        double pf = 0.3;
        for (int it = 0; it < 200; ++it) {
            double p_no_bf = 1.0, mean_tau = 0.0, tot = 0.0;
            for (int s = 0; s <= L; ++s) {
                taus[static_cast<size_t>(s)] = tau_stage(s, pf);
                p_no_bf *= std::pow(1.0 - taus[static_cast<size_t>(s)], m[static_cast<size_t>(s)]);
                mean_tau += m[static_cast<size_t>(s)] * taus[static_cast<size_t>(s)];
                tot += m[static_cast<size_t>(s)];
            }
            mean_tau = tot > 0 ? mean_tau / tot : 0.0;
            const double p_no_other = p_no_bf / std::max(1.0 - mean_tau, 1e-12);
            const double npf = 1.0 - p_no_other * p_no_ax;
            if (std::abs(npf - pf) < 1e-10) {
                pf = npf;
                break;
            }
            pf = 0.5 * pf + 0.5 * npf;
        }
        double p_no_bf = 1.0, r_bf = 0.0;
        for (int s = 0; s <= L; ++s) {
            taus[static_cast<size_t>(s)] = tau_stage(s, pf);
            p_no_bf *= std::pow(1.0 - taus[static_cast<size_t>(s)], m[static_cast<size_t>(s)]);
            r_bf += m[static_cast<size_t>(s)] * taus[static_cast<size_t>(s)] /
                    (1.0 - taus[static_cast<size_t>(s)]);
        }
        const double p_one_bf = r_bf * p_no_bf;
        const double p_multi_bf = 1.0 - p_no_bf - p_one_bf;
        const double p_idle = p_no_bf * p_no_ax;
        const double p_sbf = p_one_bf * p_no_ax;
        const double p_sax = p_one_ax * p_no_bf;
        const double p_cbf = p_multi_bf * p_no_ax;
        const double p_cax = p_multi_ax * p_no_bf;
        const double p_cmix = 1.0 - p_idle - p_sbf - p_sax - p_cbf - p_cax;
        const double tm = p_idle * d.sigma + p_sbf * d.t_s_bf + p_sax * d.t_s_ax +
                          p_cbf * d.t_c_bf + p_cax * d.t_c_ax + p_cmix * d.t_c_cross;
        if (p_sbf <= 1e-15) break;
        const double slots = 1.0 / p_sbf;  // expected slots until one completes
        const double delta = tm * slots;
        gax_area += delta * (p_sax * ax_bits / tm);
        // Stage churn while waiting: collided mass climbs one stage...
        std::vector<double> coll(static_cast<size_t>(L) + 1);
        for (int s = 0; s <= L; ++s)
            coll[static_cast<size_t>(s)] =
                m[static_cast<size_t>(s)] * taus[static_cast<size_t>(s)] * pf * slots;
        for (int s = 0; s <= L; ++s) {
            const double c = std::min(coll[static_cast<size_t>(s)], m[static_cast<size_t>(s)]);
            m[static_cast<size_t>(s)] -= c;
            m[static_cast<size_t>(std::min(s + 1, L))] += c;
        }
        // ...and the completing station leaves, proportionally to each
        // stage's attempt contribution.
        std::vector<double> w(static_cast<size_t>(L) + 1);
        double tw = 0.0;
        for (int s = 0; s <= L; ++s) {
            w[static_cast<size_t>(s)] = m[static_cast<size_t>(s)] * taus[static_cast<size_t>(s)] /
                                        (1.0 - taus[static_cast<size_t>(s)]);
            tw += w[static_cast<size_t>(s)];
        }
        for (int s = 0; s <= L; ++s)
            m[static_cast<size_t>(s)] =
                std::max(m[static_cast<size_t>(s)] - w[static_cast<size_t>(s)] / tw, 0.0);
        t += delta;
        completion_times.push_back(t);
    }

    if (completion_times.empty())
        throw SingularModel("burst_fluid_drain: no completions");
    FluidDrain out;
    double sum = 0.0;
    for (double ct : completion_times) sum += ct;
    out.mean_latency_us = sum / static_cast<double>(completion_times.size());
    out.drain_us = completion_times.back();
    const double g0 = nax > 0 ? data_goodput_bits_per_us(0, nax, cfg) : 0.0;
    out.goodput_bits_per_us =
        out.drain_us >= interval
            ? gax_area / out.drain_us
            : (gax_area + (interval - out.drain_us) * g0) / interval;
    return out;
}

}  // namespace detail

inline BurstEstimate aligned_burst_estimate(const ScenarioConfig& cfg) {
    const int nbf = cfg.population.n_bf_aps, nax = cfg.population.n_ax_aps;
    if (nbf < 1) throw InvalidParameter("aligned_burst_estimate: needs a sensing AP");

    const detail::FluidDrain fl = detail::burst_fluid_drain(cfg);
    ScenarioConfig one = cfg;
    one.population.n_bf_aps = 1;
    const detail::FluidDrain fl1 = nbf == 1 ? fl : detail::burst_fluid_drain(one);

    // Anchor: the exact single-station value. A burst begins on a cleared
    // channel, where the optimistic every-slot decrement costing tracks the
    // dynamics; no collision-span mixing with a single sensing station.
    DelayOptions anchor_opt;
    anchor_opt.costing = DecrementCosting::every_slot;
    anchor_opt.collision_span_mix = false;
    const double ts1 = saturated_point(one, anchor_opt).delay.mean_access_delay_T;
    const double exact1 = incidence_residual_us(0, nax, cfg) + ts1;
    const double scale = exact1 / fl1.mean_latency_us;

    BurstEstimate out;
    out.fluid_latency_us = fl.mean_latency_us;
    out.anchor_scale = scale;
    out.mean_latency_us = fl.mean_latency_us * scale;
    out.drain_us = fl.drain_us * scale;
    out.aggregate_throughput_bps = fl.goodput_bits_per_us * 1e6;
    return out;
}

// Regimes of the analytic engine. The estimator follows the arrival process:
// aligned periodic epochs with several sensing networks drain as a burst;
// a lone sensing network (or desynchronized epochs) sees the stationary
// picture; continuous refill is the saturated chain itself; poisson requests
// couple through the occupancy identity.
enum class AnalyticRegime { saturated, stationary, burst, occupancy };

inline const char* to_string(AnalyticRegime r) {
    switch (r) {
        case AnalyticRegime::saturated: return "saturated";
        case AnalyticRegime::stationary: return "stationary";
        case AnalyticRegime::burst: return "burst";
        case AnalyticRegime::occupancy: return "occupancy";
    }
    return "?";
}

struct AnalyticPoint {
    AnalyticRegime regime = AnalyticRegime::stationary;
    double latency_us = 0;  // headline mean-latency estimate for the regime
    double aggregate_throughput_bps = 0;
    double per_network_throughput_bps = 0;
    // Diagnostics (populated where the regime defines them).
    double raw_latency_us = 0;
    double response_latency_us = 0;
    double censored_latency_us = 0;
    double saturated_service_us = 0;
    double incidence_us = 0;
    double drain_us = 0;
    double anchor_scale = 1.0;
    double p_idle_station = 0;  // occupancy regime: P0
};

inline AnalyticRegime default_regime(const ScenarioConfig& cfg) {
    switch (cfg.arrival_mode) {
        case ArrivalMode::continuous: return AnalyticRegime::saturated;
        case ArrivalMode::poisson: return AnalyticRegime::occupancy;
        case ArrivalMode::periodic:
            return cfg.population.n_bf_aps >= 2 && cfg.startup_jitter_us < cfg.interval_us
                       ? AnalyticRegime::burst
                       : AnalyticRegime::stationary;
    }
    return AnalyticRegime::stationary;
}

inline AnalyticPoint analytic_point(const ScenarioConfig& cfg, AnalyticRegime regime) {
    cfg.validate();
    const int nbf = cfg.population.n_bf_aps, nax = cfg.population.n_ax_aps;
    AnalyticPoint out;

    if (nbf == 0) {  // data-only channel: throughput is the whole story
        out.regime = AnalyticRegime::saturated;
        out.aggregate_throughput_bps = data_goodput_bits_per_us(0, nax, cfg) * 1e6;
        out.per_network_throughput_bps =
            nax > 0 ? out.aggregate_throughput_bps / nax : 0.0;
        return out;
    }

    out.regime = regime;
    switch (out.regime) {
        case AnalyticRegime::saturated: {
            const SaturatedPoint sp = saturated_point(cfg);
            out.latency_us = sp.delay.mean_access_delay_T;
            out.raw_latency_us = out.latency_us;
            out.saturated_service_us = out.latency_us;
            const AxThroughput g = ax_throughput(sp.solution, sp.durations, cfg.traffic);
            out.aggregate_throughput_bps = g.aggregate_bps;
            out.per_network_throughput_bps = nax > 0 ? g.aggregate_bps / nax : 0.0;
            break;
        }
        case AnalyticRegime::stationary: {
            const StationaryEstimate e = periodic_stationary_estimate(cfg);
            out.latency_us = e.censored_latency_us;
            out.censored_latency_us = e.censored_latency_us;
            out.raw_latency_us = e.raw_latency_us;
            out.response_latency_us = e.response_latency_us;
            out.saturated_service_us = e.saturated_service_us;
            out.incidence_us = e.incidence_us;
            out.aggregate_throughput_bps = e.aggregate_throughput_bps;
            out.per_network_throughput_bps = e.per_network_throughput_bps;
            break;
        }
        case AnalyticRegime::burst: {
            const BurstEstimate e = aligned_burst_estimate(cfg);
            out.latency_us = e.mean_latency_us;
            out.raw_latency_us = e.mean_latency_us;
            out.drain_us = e.drain_us;
            out.anchor_scale = e.anchor_scale;
            out.aggregate_throughput_bps = e.aggregate_throughput_bps;
            out.per_network_throughput_bps =
                nax > 0 ? e.aggregate_throughput_bps / nax : 0.0;
            break;
        }
        case AnalyticRegime::occupancy: {
            const UnsaturatedResult r =
                unsaturated_sensing_delay(cfg, 1.0 / cfg.interval_us);
            out.latency_us = r.mean_delay_us;
            out.raw_latency_us = r.mean_delay_us;
            out.p_idle_station = r.p0;
            const double b = std::min(r.mean_delay_us / cfg.interval_us, 1.0);
            double g = 0.0;
            for (int k = 0; k <= nbf; ++k)
                g += binom_pmf(nbf, k, b) * data_goodput_bits_per_us(k, nax, cfg);
            out.aggregate_throughput_bps = g * 1e6;
            out.per_network_throughput_bps =
                nax > 0 ? out.aggregate_throughput_bps / nax : 0.0;
            break;
        }
    }
    return out;
}

inline AnalyticPoint analytic_point(const ScenarioConfig& cfg) {
    return analytic_point(cfg, default_regime(cfg));
}

}  // namespace coex
