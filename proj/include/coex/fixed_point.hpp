#pragma once
#include <cmath>
#include <cstdint>

#include "coex/types.hpp"

namespace coex {

// Converged per-slot attempt/collision probabilities for the two populations,
// plus the derived channel-event probabilities.
struct FixedPointSolution {
    double tau_bf = 0, tau_ax = 0;   // per-slot attempt probability
    double p_bf = 0, p_ax = 0;       // conditional collision probability
    double p_f_bf = 0, p_f_ax = 0;   // freeze probability (= collision prob)
    double p_t_bf = 0, p_t_ax = 0;   // >=1 member of the population transmits
    double p_s_bf = 0, p_s_ax = 0;   // exactly one, given >=1 (within population)
    double residual = 0;
    int iterations = 0;
};

// Closed-form per-slot attempt probability of a station experiencing
// collision probability p_coll and freeze probability p_f:
//   tau = [(1-P^{L+1})/(1-P)] / sum_j [1 + (W_j-1)/(2(1-P_f))] P^j
// where W_j = min(2^j cw_min, cw_max).
inline double attempt_probability(double p_coll, double p_f, const EdcaClass& edca) {
    edca.validate();
    if (p_coll < 0 || p_coll >= 1.0 || p_f < 0 || p_f > 1.0)
        throw InvalidParameter("attempt_probability: probabilities must lie in [0,1)");
    if (p_f >= 1.0)
        throw SingularModel("attempt_probability: freeze probability of 1 stalls the counter");
    const int L = edca.retry_limit_L;
    double num;
    if (p_coll == 0.0) {
        num = 1.0;
    } else {
        num = (1.0 - std::pow(p_coll, L + 1)) / (1.0 - p_coll);
    }
    double den = 0.0, pj = 1.0;
    for (int j = 0; j <= L; ++j) {
        const double w = static_cast<double>(edca.window(j));
        den += (1.0 + (w - 1.0) / (2.0 * (1.0 - p_f))) * pj;
        pj *= p_coll;
    }
    return num / den;
}

namespace detail {
inline double pow_nonneg(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}
}  // namespace detail

// Solve the coupled system over (tau_bf, tau_ax):
//   P_x  = 1 - (1-tau_x)^(N_x-1) (1-tau_y)^(N_y)
//   tau_x = attempt_probability(P_x, P_x, edca_x)
// by damped iteration, then fill the event probabilities.
inline FixedPointSolution solve_fixed_point(const PopulationMix& pop,
                                            double tol = 1e-9, int max_iter = 100000) {
    pop.validate();
    const int nb = pop.n_bf_aps, na = pop.n_ax_aps;

    auto coll_bf = [&](double tb, double ta) {
        return nb > 0 ? 1.0 - detail::pow_nonneg(1.0 - tb, nb - 1) * detail::pow_nonneg(1.0 - ta, na)
                      : 0.0;
    };
    auto coll_ax = [&](double tb, double ta) {
        return na > 0 ? 1.0 - detail::pow_nonneg(1.0 - ta, na - 1) * detail::pow_nonneg(1.0 - tb, nb)
                      : 0.0;
    };

    double tb = nb > 0 ? 0.1 : 0.0;
    double ta = na > 0 ? 0.1 : 0.0;
    double damp = 0.5;
    double prev_res = 1e300;
    double res = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        const double pb = coll_bf(tb, ta);
        const double pa = coll_ax(tb, ta);
        const double prop_tb = nb > 0 ? attempt_probability(pb, pb, pop.edca_bf) : 0.0;
        const double prop_ta = na > 0 ? attempt_probability(pa, pa, pop.edca_ax) : 0.0;
        res = std::max(std::abs(prop_tb - tb), std::abs(prop_ta - ta));
        if (res <= tol) {
            tb = prop_tb;
            ta = prop_ta;
            break;
        }
        if (res > prev_res * 1.0000001 && damp > 1.0 / 64.0) damp *= 0.5;  // oscillation guard
        prev_res = res;
        tb = (1.0 - damp) * tb + damp * prop_tb;
        ta = (1.0 - damp) * ta + damp * prop_ta;
    }
    if (res > tol)
        throw ConvergenceFailure("solve_fixed_point: no convergence", res);

    FixedPointSolution s;
    s.tau_bf = tb;
    s.tau_ax = ta;
    s.p_bf = coll_bf(tb, ta);
    s.p_ax = coll_ax(tb, ta);
    s.p_f_bf = s.p_bf;
    s.p_f_ax = s.p_ax;
    s.p_t_bf = nb > 0 ? 1.0 - detail::pow_nonneg(1.0 - tb, nb) : 0.0;
    s.p_t_ax = na > 0 ? 1.0 - detail::pow_nonneg(1.0 - ta, na) : 0.0;
    s.p_s_bf = s.p_t_bf > 0
                   ? nb * tb * detail::pow_nonneg(1.0 - tb, nb - 1) / s.p_t_bf
                   : 0.0;
    s.p_s_ax = s.p_t_ax > 0
                   ? na * ta * detail::pow_nonneg(1.0 - ta, na - 1) / s.p_t_ax
                   : 0.0;
    s.residual = res;
    s.iterations = it;
    return s;
}

}  // namespace coex
