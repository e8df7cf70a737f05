#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "coex/durations.hpp"
#include "coex/event_mix.hpp"
#include "coex/fixed_point.hpp"
#include "coex/rng.hpp"

using namespace coex;
using Catch::Approx;

namespace {
DurationTable reference_durations() {
    ScenarioConfig cfg;
    cfg.timing.rate_R = 60.0;
    cfg.sensing.t_polling = cfg.sensing.t_cts = cfg.sensing.t_ndpa = cfg.sensing.t_ndp = 50.0;
    return event_durations(cfg);
}

FixedPointSolution reference_solution(int nbf, int nax) {
    PopulationMix pop;
    pop.n_bf_aps = nbf;
    pop.n_ax_aps = nax;
    return solve_fixed_point(pop);
}
}  // namespace

TEST_CASE("binomial mass function") {
    CHECK(binom_pmf(5, 0, 0.3) == Approx(std::pow(0.7, 5)).margin(1e-15));
    CHECK(binom_pmf(5, 5, 0.3) == Approx(std::pow(0.3, 5)).margin(1e-15));
    CHECK(binom_pmf(4, 2, 0.5) == Approx(6.0 / 16.0).margin(1e-15));
    CHECK(binom_pmf(4, 5, 0.5) == 0.0);
    CHECK(binom_pmf(4, -1, 0.5) == 0.0);
    double total = 0;
    for (int k = 0; k <= 7; ++k) total += binom_pmf(7, k, 0.37);
    CHECK(total == Approx(1.0).margin(1e-12));
}

TEST_CASE("the nine event weights form a probability distribution") {
    const DurationTable d = reference_durations();
    for (auto [nbf, nax] : {std::pair{1, 1}, {3, 2}, {5, 9}, {1, 0}, {0, 4}}) {
        const FixedPointSolution s = reference_solution(nbf, nax);
        const EventTerms t = mean_event_time_terms(s, d);
        double total = 0;
        for (double w : t.weight) {
            CHECK(w >= 0.0);
            total += w;
        }
        INFO("populations " << nbf << " and " << nax);
        CHECK(total == Approx(1.0).margin(1e-12));
        CHECK(t.mean >= d.sigma);
    }
}

TEST_CASE("technology-level and transmitter-count event mixes agree") {
    // Two independent classifications of the same slot algebra: the
    // nine-way technology split and the per-count joint distribution.
    const DurationTable d = reference_durations();
    for (auto [nbf, nax] : {std::pair{1, 1}, {3, 2}, {2, 7}}) {
        const FixedPointSolution s = reference_solution(nbf, nax);
        const EventTerms t = mean_event_time_terms(s, d);
        const SlotEventMix m = slot_event_mix(nbf, nax, s.tau_bf, s.tau_ax, d);

        double prob_total = 0;
        for (const auto& e : m.entries) prob_total += e.prob;
        CHECK(prob_total == Approx(1.0).margin(1e-12));
        CHECK(m.mean_span == Approx(t.mean).epsilon(1e-12));
        CHECK(m.p_idle ==
              Approx(std::pow(1.0 - s.tau_bf, nbf) * std::pow(1.0 - s.tau_ax, nax))
                  .margin(1e-12));
        // Exactly-one-transmitter events match the technology split.
        CHECK(m.p_success_bf == Approx(s.p_t_bf * s.p_s_bf * (1.0 - s.p_t_ax)).margin(1e-12));
        CHECK(m.p_success_ax == Approx(s.p_t_ax * s.p_s_ax * (1.0 - s.p_t_bf)).margin(1e-12));
        CHECK(m.mean_square_span >= m.mean_span * m.mean_span);
    }
}

TEST_CASE("slot mix matches Monte Carlo station-level sampling") {
    const DurationTable d = reference_durations();
    const int nbf = 2, nax = 3;
    const double tau_bf = 0.11, tau_ax = 0.23;
    const SlotEventMix m = slot_event_mix(nbf, nax, tau_bf, tau_ax, d);

    Rng rng(12345, 0);
    const int n = 2'000'000;
    double sum = 0, sum_sq = 0;
    std::int64_t idle = 0, sbf = 0, sax = 0;
    for (int i = 0; i < n; ++i) {
        int kb = 0, ka = 0;
        for (int s = 0; s < nbf; ++s) kb += rng.uniform01() < tau_bf ? 1 : 0;
        for (int s = 0; s < nax; ++s) ka += rng.uniform01() < tau_ax ? 1 : 0;
        double span;
        if (kb + ka == 0) {
            span = d.sigma;
            ++idle;
        } else if (kb == 1 && ka == 0) {
            span = d.t_s_bf;
            ++sbf;
        } else if (kb == 0 && ka == 1) {
            span = d.t_s_ax;
            ++sax;
        } else if (ka == 0) {
            span = d.t_c_bf;
        } else if (kb == 0) {
            span = d.t_c_ax;
        } else {
            span = d.t_c_cross;
        }
        sum += span;
        sum_sq += span * span;
    }
    const double mc_mean = sum / n;
    const double mc_sd = std::sqrt((sum_sq / n - mc_mean * mc_mean) / n);
    CHECK(std::fabs(mc_mean - m.mean_span) < 5.0 * mc_sd);
    CHECK(std::fabs(static_cast<double>(idle) / n - m.p_idle) < 5e-3);
    CHECK(std::fabs(static_cast<double>(sbf) / n - m.p_success_bf) < 5e-3);
    CHECK(std::fabs(static_cast<double>(sax) / n - m.p_success_ax) < 5e-3);
}

TEST_CASE("data-population throughput") {
    const DurationTable d = reference_durations();
    const FixedPointSolution s = reference_solution(1, 1);
    AxTrafficProfile traffic;

    const AxThroughput t = ax_throughput(s, d, traffic);
    CHECK(t.normalized > 0.0);
    CHECK(t.normalized < 1.0);

    // Goodput equals the success share times payload bits over the mean
    // event time.
    const double p_succ = s.p_t_ax * s.p_s_ax * (1.0 - s.p_t_bf);
    const double payload = static_cast<double>(d.ax_mpdu_effective) * traffic.msdu_bits;
    CHECK(t.aggregate_bps ==
          Approx(p_succ * payload / mean_event_time(s, d) * 1e6).epsilon(1e-12));

    SECTION("the lone-network share drops when sensing contention appears") {
        const FixedPointSolution alone = reference_solution(0, 1);
        const AxThroughput t_alone = ax_throughput(alone, d, traffic);
        CHECK(t_alone.aggregate_bps > t.aggregate_bps);
    }
}

TEST_CASE("degenerate attempt probabilities collapse the mix") {
    const DurationTable d = reference_durations();
    const SlotEventMix all_idle = slot_event_mix(3, 3, 0.0, 0.0, d);
    CHECK(all_idle.p_idle == Approx(1.0).margin(1e-15));
    CHECK(all_idle.mean_span == Approx(d.sigma).margin(1e-12));

    const SlotEventMix all_tx = slot_event_mix(2, 2, 1.0, 1.0, d);
    CHECK(all_tx.p_idle == 0.0);
    CHECK(all_tx.mean_span == Approx(d.t_c_cross).margin(1e-12));
}
