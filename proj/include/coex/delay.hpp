#pragma once
#include <cmath>
#include <vector>

#include "coex/durations.hpp"
#include "coex/event_mix.hpp"
#include "coex/fixed_point.hpp"
#include "coex/residency.hpp"
#include "coex/types.hpp"

namespace coex {

// Costing of one backoff-counter decrement.
enum class DecrementCosting {
    every_slot,  // the counter pays the mean slot cost once per slot
    idle_only,   // the counter advances only on idle slots (freeze-geometric)
};

struct DelayOptions {
    // Cross-validated defaults (see the comparison reports): freeze-geometric
    // decrement costing, partner-mixed collision spans, and the
    // sensing-silence factor on the data-success busy term.
    DecrementCosting costing = DecrementCosting::idle_only;
    bool collision_span_mix = true;
    ResidencyOptions residency{};
};

struct BackoffSlotCost {
    double f = 0;       // mean cost of one decrement, mixing entry states
    double f_b = 0;     // entry from a backoff state
    double f_t = 0;     // entry from the tagged station's own transmission
    double cw_bar = 0;  // mean contention window of the tagged station
};

// Mean time consumed per backoff-counter decrement of a tagged sensing
// station: the residency-weighted slot cost, divided by the decrement
// probability of the selected costing.
inline BackoffSlotCost mean_backoff_slot(const FixedPointSolution& s, const SlotResidency& r,
                                         const PopulationMix& pop,
                                         DecrementCosting costing = DecrementCosting::every_slot) {
    const double p_d =
        costing == DecrementCosting::every_slot ? 1.0 : std::max(r.p_i, 1e-12);
    if (p_d <= 0.0) throw SingularModel("mean_backoff_slot: decrement probability is zero");
    BackoffSlotCost out;
    out.cw_bar = mean_window(s.p_bf, pop.edca_bf);
    out.f_b = (r.p_i * r.d_i + r.p_s * r.d_s + r.p_c * r.d_c) / p_d;
    out.f_t = (out.cw_bar - 1.0) / out.cw_bar * out.f_b;
    out.f = (1.0 - s.tau_bf) * out.f_b + s.tau_bf * out.f_t;
    return out;
}

struct StageTerm {
    int stage = 0;
    double p_success = 0;  // (1-P) P^i, unnormalized
    double delay_us = 0;   // session completion time given success at this stage
};

struct DelayBreakdown {
    double mean_access_delay_T = 0;  // saturated request-to-completion mean (us)
    std::vector<StageTerm> per_stage_terms;
    double f_avg_slot = 0, f_b = 0, f_t = 0, cw_bar = 0;
    double d_i = 0, d_s = 0, d_c = 0, gamma = 0;
    double p_ci = 0, p_cs = 0, p_cc = 0;
    double collision_span = 0;  // span charged per retransmission (us)
};

// Expected span of the slot in which the tagged sensing station collides:
// the largest participant duration, mixed over the partner composition.
inline double tagged_collision_span(const FixedPointSolution& s, const DurationTable& d,
                                    const PopulationMix& pop, bool mix) {
    if (!mix) return d.t_c_bf;
    const int ob = pop.n_bf_aps - 1, oa = pop.n_ax_aps;
    const double p_any = 1.0 - detail::pow_nonneg(1.0 - s.tau_bf, ob) *
                                   detail::pow_nonneg(1.0 - s.tau_ax, oa);
    if (p_any <= 0.0) return d.t_c_bf;
    const double p_ax_in = 1.0 - detail::pow_nonneg(1.0 - s.tau_ax, oa);
    return (p_ax_in * std::max(d.t_c_ax, d.t_c_bf) + (p_any - p_ax_in) * d.t_c_bf) / p_any;
}

// Saturated mean sensing delay of a tagged sensing station: success-stage
// ladder over the backoff chain. Stage i pays the session span, i
// retransmission spans, and the accumulated mean backoff of stages 0..i.
inline DelayBreakdown saturated_sensing_delay(const FixedPointSolution& s,
                                              const DurationTable& d,
                                              const PopulationMix& pop,
                                              const DelayOptions& opt = {}) {
    const SlotResidency r = slot_residency(s, d, pop, opt.residency);
    const BackoffSlotCost f = mean_backoff_slot(s, r, pop, opt.costing);
    const double c_span = tagged_collision_span(s, d, pop, opt.collision_span_mix);
    const EdcaClass& e = pop.edca_bf;
    const int L = e.retry_limit_L;
    const double P = s.p_bf;

    DelayBreakdown out;
    out.f_avg_slot = f.f;
    out.f_b = f.f_b;
    out.f_t = f.f_t;
    out.cw_bar = f.cw_bar;
    out.d_i = r.d_i;
    out.d_s = r.d_s;
    out.d_c = r.d_c;
    out.gamma = r.gamma;
    out.p_ci = r.p_ci;
    out.p_cs = r.p_cs;
    out.p_cc = r.p_cc;
    out.collision_span = c_span;

    double acc = 0.0, pj = 1.0, num = 0.0, den = 0.0;
    out.per_stage_terms.reserve(static_cast<size_t>(L) + 1);
    for (int i = 0; i <= L; ++i) {
        acc += (e.window(i) - 1.0) / 2.0 * f.f;
        const double t_i = d.t_f_bf + i * c_span + acc;
        const double w = (1.0 - P) * pj;
        out.per_stage_terms.push_back({i, w, t_i});
        num += w * t_i;
        den += w;
        pj *= P;
    }
    out.mean_access_delay_T = num / den;
    return out;
}

// Convenience: full pipeline at a given population.
struct SaturatedPoint {
    FixedPointSolution solution;
    DurationTable durations;
    DelayBreakdown delay;
};

inline SaturatedPoint saturated_point(const ScenarioConfig& cfg, const DelayOptions& opt = {}) {
    SaturatedPoint p;
    p.durations = event_durations(cfg);
    p.solution = solve_fixed_point(cfg.population);
    p.delay = saturated_sensing_delay(p.solution, p.durations, cfg.population, opt);
    return p;
}

struct UnsaturatedResult {
    double mean_delay_us = 0;  // E[T]
    double p0 = 0;             // probability a sensing AP is idle
    double mu_bar = 0;         // service rate, 1/us
    int iterations = 0;
};

// Occupancy-coupled mean sensing delay under request rate lambda (1/us):
// each of the other sensing APs contends independently with probability
// 1-P0; the tagged delay mixes the saturated chain over that binomial
// contender count; P0 = 1 - lambda * E[T] closes the loop.
inline UnsaturatedResult unsaturated_sensing_delay(const ScenarioConfig& cfg,
                                                   double lambda_per_us,
                                                   const DelayOptions& opt = {},
                                                   double tol = 1e-6, int max_iter = 10000) {
    if (lambda_per_us <= 0) throw InvalidParameter("unsaturated_sensing_delay: lambda must be > 0");
    cfg.validate();
    const int nbf = cfg.population.n_bf_aps;
    if (nbf < 1) throw InvalidParameter("unsaturated_sensing_delay: needs a sensing AP");

    // Saturated delay with the tagged + i other active sensing APs.
    std::vector<double> t_by_contenders(static_cast<size_t>(nbf));
    for (int i = 0; i < nbf; ++i) {
        ScenarioConfig c = cfg;
        c.population.n_bf_aps = i + 1;
        t_by_contenders[static_cast<size_t>(i)] = saturated_point(c, opt).delay.mean_access_delay_T;
    }

    // E[T] >= the uncontended delay, so lambda >= 1/t_min is unconditionally
    // beyond capacity.
    if (lambda_per_us * t_by_contenders[0] >= 1.0)
        throw InstabilityError(
            "unsaturated_sensing_delay: request rate exceeds service capacity");

    double p0 = 0.5;
    UnsaturatedResult out;
    for (int it = 0; it < max_iter; ++it) {
        double e_t = 0.0;
        for (int i = 0; i < nbf; ++i)
            e_t += binom_pmf(nbf - 1, i, 1.0 - p0) * t_by_contenders[static_cast<size_t>(i)];
        const double rho = lambda_per_us * e_t;
        const double proposed = 1.0 - rho;
        out.mean_delay_us = e_t;
        out.mu_bar = 1.0 / e_t;
        out.iterations = it + 1;
        if (std::abs(proposed - p0) <= 0.5 * tol) {
            if (rho >= 1.0)
                throw InstabilityError(
                    "unsaturated_sensing_delay: request rate exceeds service capacity");
            out.p0 = p0;
            return out;
        }
        if (proposed < 0.0 && p0 <= 1e-3)
            throw InstabilityError(
                "unsaturated_sensing_delay: request rate exceeds service capacity");
        p0 = 0.5 * p0 + 0.5 * std::clamp(proposed, 0.0, 1.0);
    }
    throw ConvergenceFailure("unsaturated_sensing_delay: no convergence",
                             std::abs(1.0 - lambda_per_us * out.mean_delay_us - p0));
}

}  // namespace coex
