// Summary statistics: quantiles against hand-computed values, histogram mass
// conservation, failure accounting, and cross-engine comparison flags.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "coex/campaign.hpp"
#include "coex/estimators.hpp"
#include "coex/metrics.hpp"
#include "coex/sim.hpp"

using namespace coex;
using Catch::Approx;

namespace {

RunMetrics synthetic_run(std::vector<double> lat, double goodput, double idle_us,
                         double busy_us, std::int64_t dropped, std::int64_t attempted) {
    RunMetrics m;
    m.latency_samples_us = std::move(lat);
    m.aggregate_goodput_bps = goodput;
    m.channel[static_cast<size_t>(ChannelOutcome::idle)] = {10, idle_us};
    m.channel[static_cast<size_t>(ChannelOutcome::success_data)] = {5, busy_us};
    m.slot_count = 15;
    m.dropped_count = dropped;
    m.attempted_count = attempted;
    m.arrival_count = attempted;
    m.duration_us = idle_us + busy_us;
    m.sim_time_us = idle_us + busy_us;
    return m;
}

}  // namespace

TEST_CASE("quantiles interpolate linearly between order statistics") {
    const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(sorted_quantile(s, 0.0) == Approx(1.0));
    CHECK(sorted_quantile(s, 1.0) == Approx(10.0));
    CHECK(sorted_quantile(s, 0.5) == Approx(5.5));
    CHECK(sorted_quantile(s, 0.05) == Approx(1.45));
    CHECK(sorted_quantile(s, 0.25) == Approx(3.25));
    CHECK(sorted_quantile(s, 0.75) == Approx(7.75));
    CHECK(sorted_quantile(s, 0.95) == Approx(9.55));

    CHECK(sorted_quantile({4, 6, 8}, 0.5) == Approx(6.0));
    CHECK(sorted_quantile({7}, 0.05) == Approx(7.0));
    CHECK(sorted_quantile({7}, 0.95) == Approx(7.0));
    CHECK(sorted_quantile({3, 9}, 0.5) == Approx(6.0));

    CHECK_THROWS_AS(sorted_quantile({}, 0.5), InvalidParameter);
    CHECK_THROWS_AS(sorted_quantile(s, -0.1), InvalidParameter);
    CHECK_THROWS_AS(sorted_quantile(s, 1.1), InvalidParameter);
}

TEST_CASE("summary quantiles are ordered") {
    std::vector<double> samples;
    for (int i = 0; i < 257; ++i)
        samples.push_back(static_cast<double>((i * 7919) % 1009));
    const DistributionSummary s = summarize_samples(samples);
    REQUIRE_FALSE(s.empty);
    CHECK(s.n_samples == samples.size());
    CHECK(s.p5 <= s.p25);
    CHECK(s.p25 <= s.median);
    CHECK(s.median <= s.p75);
    CHECK(s.p75 <= s.p95);
    CHECK(s.mean > s.p5);
    CHECK(s.mean < s.p95);
}

TEST_CASE("histogram conserves mass with hand-checked bins") {
    std::vector<double> samples;
    for (int i = 0; i < 64; ++i) samples.push_back(static_cast<double>(i));
    const Histogram h = make_histogram(samples);
    // Freedman-Diaconis width: IQR = 31.5, n^(1/3) = 4 -> width 15.75.
    REQUIRE(h.counts.size() == 4);
    REQUIRE(h.edges.size() == 5);
    CHECK(h.edges.front() == Approx(0.0));
    CHECK(h.edges.back() == Approx(63.0));
    for (std::int64_t c : h.counts) CHECK(c == 16);
    CHECK(h.total() == 64);
}

TEST_CASE("histogram closes its last bin on the maximum sample") {
    const Histogram h = make_histogram({0.0, 10.0});
    REQUIRE(h.counts.size() == 2);
    CHECK(h.counts.front() == 1);
    CHECK(h.counts.back() == 1);
    CHECK(h.total() == 2);
}

TEST_CASE("histogram handles degenerate and empty samples") {
    const Histogram all_equal = make_histogram({5.0, 5.0, 5.0});
    REQUIRE(all_equal.counts.size() == 1);
    CHECK(all_equal.counts[0] == 3);
    CHECK(all_equal.edges[0] == Approx(5.0));
    CHECK(all_equal.edges[1] > 5.0);

    const Histogram empty = make_histogram({});
    CHECK(empty.counts.empty());
    CHECK(empty.total() == 0);
}

TEST_CASE("histogram never exceeds the bin cap") {
    std::vector<double> samples;
    std::uint64_t x = 88172645463325252ull;
    for (int i = 0; i < 20000; ++i) {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        samples.push_back(static_cast<double>(x % 1000000) / 1000.0);
    }
    const Histogram h = make_histogram(samples);
    CHECK(h.counts.size() <= 64);
    CHECK(h.total() == 20000);
}

TEST_CASE("failure rate pools drops over attempts") {
    RunMetrics a;
    a.dropped_count = 3;
    a.attempted_count = 10;
    RunMetrics b;
    b.dropped_count = 1;
    b.attempted_count = 10;
    const FailureRate f = failure_rate({a, b});
    REQUIRE(f.defined);
    CHECK(f.percent == Approx(20.0));
    CHECK(f.dropped == 4);
    CHECK(f.attempted == 20);

    const FailureRate zero = failure_rate({synthetic_run({1.0}, 0, 1, 1, 0, 5)});
    REQUIRE(zero.defined);
    CHECK(zero.percent == Approx(0.0));

    const FailureRate undefined = failure_rate({RunMetrics{}});
    CHECK_FALSE(undefined.defined);
    CHECK(undefined.percent == 0.0);
}

TEST_CASE("campaign summary pools runs and is permutation invariant") {
    const RunMetrics r1 = synthetic_run({100, 200, 300}, 10e6, 500, 500, 1, 4);
    const RunMetrics r2 = synthetic_run({150, 250}, 30e6, 200, 800, 0, 2);
    const RunMetrics r3 = synthetic_run({50}, 20e6, 900, 100, 2, 3);

    const CampaignSummary ab = summarize({r1, r2, r3});
    const CampaignSummary ba = summarize({r3, r1, r2});

    CHECK(ab.run_count == 3);
    CHECK(ab.latency_us.n_samples == 6);
    CHECK(ab.mean_aggregate_throughput_bps == Approx(20e6));
    CHECK(ab.failures.percent == Approx(100.0 * 3 / 9));
    CHECK(ab.idle_fraction == Approx(1600.0 / 3000.0));
    CHECK(ab.idle_fraction + ab.busy_fraction == Approx(1.0).margin(1e-12));
    CHECK(ab.total_slots == 45);

    CHECK(ab.latency_us.mean == Approx(ba.latency_us.mean));
    CHECK(ab.latency_us.median == Approx(ba.latency_us.median));
    CHECK(ab.latency_us.p5 == Approx(ba.latency_us.p5));
    CHECK(ab.latency_us.p95 == Approx(ba.latency_us.p95));
    CHECK(ab.mean_aggregate_throughput_bps == Approx(ba.mean_aggregate_throughput_bps));
    CHECK(ab.failures.percent == Approx(ba.failures.percent));
    CHECK(ab.idle_fraction == Approx(ba.idle_fraction));
    CHECK(ab.total_slots == ba.total_slots);
    REQUIRE(ab.latency_us.histogram.counts == ba.latency_us.histogram.counts);
}

TEST_CASE("summary flags an empty latency pool instead of fabricating one") {
    const RunMetrics quiet = synthetic_run({}, 5e6, 300, 700, 0, 0);
    const CampaignSummary s = summarize({quiet});
    CHECK(s.latency_us.empty);
    CHECK(s.latency_us.n_samples == 0);
    CHECK(s.mean_aggregate_throughput_bps == Approx(5e6));
    CHECK_FALSE(s.failures.defined);
}

TEST_CASE("summarize rejects an empty run list") {
    REQUIRE_THROWS_AS(summarize({}), InvalidParameter);
}

TEST_CASE("airtime identity holds on a real run") {
    ScenarioConfig cfg = calibrated_baseline();
    cfg.duration_s = 2.0;
    const CampaignSummary s = summarize({simulate(cfg, 1), simulate(cfg, 2)});
    CHECK(s.idle_fraction + s.busy_fraction == Approx(1.0).margin(1e-12));
    CHECK(s.idle_fraction > 0.0);
    CHECK(s.busy_fraction > 0.0);
}

TEST_CASE("engine comparison flags only errors beyond the threshold") {
    AnalyticPoint a;
    a.latency_us = 8000.0;
    a.aggregate_throughput_bps = 50e6;
    CampaignSummary s;
    s.latency_us.mean = 8800.0;
    s.mean_aggregate_throughput_bps = 50e6;

    const EngineComparison c = compare_engines(a, s);
    CHECK(c.threshold == Approx(0.15));
    CHECK(c.latency_rel_error == Approx((8000.0 - 8800.0) / 8800.0));
    CHECK_FALSE(c.latency_flagged);
    CHECK(c.throughput_rel_error == Approx(0.0));
    CHECK_FALSE(c.throughput_flagged);

    a.latency_us = 10400.0;
    const EngineComparison hot = compare_engines(a, s);
    CHECK(hot.latency_rel_error > 0.15);
    CHECK(hot.latency_flagged);

    const EngineComparison strict = compare_engines(a, s, 0.05);
    CHECK(strict.threshold == Approx(0.05));
    CHECK(strict.latency_flagged);
}

TEST_CASE("relative error handles a zero baseline") {
    CHECK(relative_error(0.0, 0.0) == 0.0);
    CHECK(std::isinf(relative_error(1.0, 0.0)));
    CHECK(relative_error(11.0, 10.0) == Approx(0.1));
}
