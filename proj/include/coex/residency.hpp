#pragma once
#include <cmath>

#include "coex/event_mix.hpp"
#include "coex/fixed_point.hpp"
#include "coex/types.hpp"

namespace coex {

// Mean contention window over the backoff stages, weighted by the stage
// occupancy (1-P)P^i / (1-P^(L+1)).
inline double mean_window(double p_coll, const EdcaClass& edca) {
    const int L = edca.retry_limit_L;
    if (p_coll >= 1.0) p_coll = 1.0 - 1e-12;
    double num = 0.0, den = 0.0, pj = 1.0;
    for (int j = 0; j <= L; ++j) {
        const double w = (1.0 - p_coll) * pj;
        num += w * edca.window(j);
        den += w;
        pj *= p_coll;
    }
    return num / den;
}

// Collision-type split for a slot already known to hold a collision:
// probabilities that the NEXT slot is idle (p_ci), a success (p_cs), or
// another collision (p_cc), assuming each collided station independently
// retransmits with probability 1/mean-window. Computed by the double sum
// over the joint transmitter-count distribution.
struct CollisionSplit {
    double p_ci = 0, p_cs = 0, p_cc = 1;
    bool degenerate = false;  // no collision pattern has positive probability
};

inline CollisionSplit collision_split(int nbf, int nax, double tau_bf, double tau_ax,
                                      double cw_bar_bf, double cw_bar_ax) {
    const double pb = 1.0 / cw_bar_bf, pa = 1.0 / cw_bar_ax;
    double wsum = 0, pci = 0, pcs = 0;
    for (int kb = 0; kb <= nbf; ++kb) {
        for (int ka = 0; ka <= nax; ++ka) {
            if (kb + ka < 2) continue;
            const double q = binom_pmf(nbf, kb, tau_bf) * binom_pmf(nax, ka, tau_ax);
            if (q <= 0.0) continue;
            const double ci = std::pow(1.0 - pa, ka) * std::pow(1.0 - pb, kb);
            double cs = 0.0;
            if (ka > 0) cs += ka * pa * std::pow(1.0 - pa, ka - 1) * std::pow(1.0 - pb, kb);
            if (kb > 0) cs += kb * pb * std::pow(1.0 - pb, kb - 1) * std::pow(1.0 - pa, ka);
            wsum += q;
            pci += q * ci;
            pcs += q * cs;
        }
    }
    CollisionSplit out;
    if (wsum <= 0.0) {
        out.degenerate = true;  // collisions cannot occur; split is vacuous
        return out;
    }
    out.p_ci = pci / wsum;
    out.p_cs = pcs / wsum;
    out.p_cc = 1.0 - out.p_ci - out.p_cs;
    if (out.p_cc < -1e-9 || out.p_cc > 1.0 + 1e-9)
        throw ModelInconsistency("collision_split: p_cc left [0,1]");
    if (out.p_cc < 0.0) out.p_cc = 0.0;
    return out;
}

// Slot residencies seen by a tagged sensing station while counting down:
// the mean time the channel spends in an idle / successful / colliding slot,
// including the expected same-state runs, plus the collision-split
// probabilities and the slot-state probabilities produced by the other
// stations (the tagged station is excluded from the composition).
struct SlotResidency {
    double d_i = 0, d_s = 0, d_c = 0;  // per-state residencies (us)
    double gamma = 0;                  // mean collision span among others (us)
    double p_i = 1, p_s = 0, p_c = 0;  // slot-state probabilities, others only
    double p_ci = 1, p_cs = 0, p_cc = 0;
    double cw_bar_bf = 0, cw_bar_ax = 0;
    bool degenerate = false;  // no collision is possible (single contender)
};

struct ResidencyOptions {
    // Include the sensing-silence factor on the data-success term of the
    // busy-split (the printed formula omits it).
    bool corrected_success_term = true;
};

inline SlotResidency slot_residency(const FixedPointSolution& s, const DurationTable& d,
                                    const PopulationMix& pop,
                                    const ResidencyOptions& opt = {}) {
    const int ob = pop.n_bf_aps - 1;  // sensing peers of the tagged station
    const int oa = pop.n_ax_aps;
    const double tb = s.tau_bf, ta = s.tau_ax;

    SlotResidency r;
    r.p_i = detail::pow_nonneg(1.0 - tb, ob) * detail::pow_nonneg(1.0 - ta, oa);
    double s_bf = ob > 0 ? ob * tb * detail::pow_nonneg(1.0 - tb, ob - 1) *
                               detail::pow_nonneg(1.0 - ta, oa)
                         : 0.0;
    double s_ax = oa > 0 ? oa * ta * detail::pow_nonneg(1.0 - ta, oa - 1) : 0.0;
    if (opt.corrected_success_term) s_ax *= detail::pow_nonneg(1.0 - tb, ob);
    r.p_s = s_bf + s_ax;
    r.p_c = std::max(1.0 - r.p_i - r.p_s, 0.0);

    r.cw_bar_bf = pop.n_bf_aps > 0 ? mean_window(s.p_bf, pop.edca_bf)
                                   : static_cast<double>(pop.edca_bf.cw_min);
    r.cw_bar_ax = pop.n_ax_aps > 0 ? mean_window(s.p_ax, pop.edca_ax)
                                   : static_cast<double>(pop.edca_ax.cw_min);

    r.d_i = d.sigma;
    if (r.p_s > 0) {
        const double t_succ = (s_bf * d.t_s_bf + s_ax * d.t_s_ax) / (s_bf + s_ax);
        // Probability the slot right after a success is again a success:
        // the winner immediately redraws counter 0 from its stage-0 window.
        const double p_ss = (s_bf / pop.edca_bf.cw_min + s_ax / pop.edca_ax.cw_min) /
                            (s_bf + s_ax);
        r.d_s = d.sigma + t_succ / (1.0 - p_ss);
    } else {
        r.d_s = d.sigma;
    }

    if (r.p_c > 0) {
        // conditional mean collision span among the other stations
        const SlotEventMix mix = slot_event_mix(ob, oa, tb, ta, d);
        double csum = 0, cspan = 0;
        for (const auto& e : mix.entries) {
            if (e.k_bf + e.k_ax >= 2) {
                csum += e.prob;
                cspan += e.prob * e.span;
            }
        }
        r.gamma = csum > 0 ? cspan / csum : d.t_c_cross;
        const CollisionSplit cs =
            collision_split(pop.n_bf_aps, pop.n_ax_aps, tb, ta, r.cw_bar_bf, r.cw_bar_ax);
        r.p_ci = cs.p_ci;
        r.p_cs = cs.p_cs;
        r.p_cc = cs.p_cc;
        double run = 0.0, pcc_i = 1.0;  // expected same-state collision run
        for (int i = 0; i <= pop.edca_bf.retry_limit_L; ++i) {
            run += pcc_i;
            pcc_i *= r.p_cc;
        }
        r.d_c = run * r.gamma + (r.p_cs * r.d_s + r.p_ci * r.d_i) / (1.0 - r.p_cc);
    } else {
        r.d_c = d.t_c_cross;
        r.degenerate = true;  // collisions cannot occur for the tagged station
    }
    return r;
}

}  // namespace coex
