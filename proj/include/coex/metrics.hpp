#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "coex/errors.hpp"
#include "coex/estimators.hpp"
#include "coex/sim.hpp"

namespace coex {

// Linear-interpolation quantile of an already sorted sample (h = (n-1)q).
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw InvalidParameter("sorted_quantile: empty sample");
    if (q < 0 || q > 1) throw InvalidParameter("sorted_quantile: q must lie in [0,1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const size_t lo = static_cast<size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

struct Histogram {
    std::vector<double> edges;        // bin i covers [edges[i], edges[i+1])
    std::vector<std::int64_t> counts; // the last bin includes its upper edge
    std::int64_t total() const {
        std::int64_t t = 0;
        for (std::int64_t c : counts) t += c;
        return t;
    }
};

// Equal-width histogram. Bin count defaults to 64; for small samples the
// Freedman-Diaconis width (2*IQR*n^{-1/3}) caps it so bins stay populated.
inline Histogram make_histogram(std::vector<double> samples, int max_bins = 64) {
    Histogram h;
    if (samples.empty()) return h;
    std::sort(samples.begin(), samples.end());
    const double lo = samples.front(), hi = samples.back();
    int bins = 1;
    if (hi > lo) {
        bins = max_bins;
        const double iqr = sorted_quantile(samples, 0.75) - sorted_quantile(samples, 0.25);
        if (iqr > 0) {
            const double fd_width =
                2.0 * iqr / std::cbrt(static_cast<double>(samples.size()));
            const int fd_bins = static_cast<int>(std::ceil((hi - lo) / fd_width));
            bins = std::clamp(fd_bins, 1, max_bins);
        }
    }
    h.edges.resize(static_cast<size_t>(bins) + 1);
    h.counts.assign(static_cast<size_t>(bins), 0);
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    for (int i = 0; i <= bins; ++i) h.edges[static_cast<size_t>(i)] = lo + width * i;
    h.edges.back() = hi > lo ? hi : lo + width;
    for (double x : samples) {
        int idx = hi > lo ? static_cast<int>((x - lo) / width) : 0;
        idx = std::clamp(idx, 0, bins - 1);
        if (hi > lo && x >= h.edges[static_cast<size_t>(idx) + 1] && idx < bins - 1) ++idx;
        ++h.counts[static_cast<size_t>(idx)];
    }
    return h;
}

struct DistributionSummary {
    double mean = 0, median = 0, p5 = 0, p25 = 0, p75 = 0, p95 = 0;
    std::size_t n_samples = 0;
    bool empty = true;  // flagged rather than fabricating statistics
    Histogram histogram;
};

inline DistributionSummary summarize_samples(std::vector<double> samples) {
    DistributionSummary s;
    s.n_samples = samples.size();
    if (samples.empty()) return s;
    s.empty = false;
    std::sort(samples.begin(), samples.end());
    double sum = 0;
    for (double x : samples) sum += x;
    s.mean = sum / static_cast<double>(samples.size());
    s.median = sorted_quantile(samples, 0.5);
    s.p5 = sorted_quantile(samples, 0.05);
    s.p25 = sorted_quantile(samples, 0.25);
    s.p75 = sorted_quantile(samples, 0.75);
    s.p95 = sorted_quantile(samples, 0.95);
    s.histogram = make_histogram(std::move(samples));
    return s;
}

struct FailureRate {
    double percent = 0;
    bool defined = false;  // false when no requests were attempted
    std::int64_t dropped = 0, attempted = 0;
};

inline FailureRate failure_rate(const std::vector<RunMetrics>& runs) {
    FailureRate f;
    for (const RunMetrics& r : runs) {
        f.dropped += r.dropped_count;
        f.attempted += r.attempted_count;
    }
    if (f.attempted > 0) {
        f.defined = true;
        f.percent = 100.0 * static_cast<double>(f.dropped) / static_cast<double>(f.attempted);
    }
    return f;
}

// Aggregated view of one scenario across seeds: latency samples pooled, the
// throughput averaged over per-run totals.
struct CampaignSummary {
    DistributionSummary latency_us;
    double mean_aggregate_throughput_bps = 0;
    DistributionSummary per_run_throughput_bps;
    FailureRate failures;
    double mean_data_frames_discarded = 0;
    std::size_t run_count = 0;
    double idle_fraction = 0, busy_fraction = 0;  // channel airtime shares
    std::int64_t total_slots = 0;
};

inline CampaignSummary summarize(const std::vector<RunMetrics>& runs) {
    if (runs.empty()) throw InvalidParameter("summarize: needs at least one run");
    CampaignSummary s;
    s.run_count = runs.size();
    std::vector<double> pooled, per_run_tput;
    per_run_tput.reserve(runs.size());
    double idle_us = 0, total_us = 0, discards = 0;
    for (const RunMetrics& r : runs) {
        pooled.insert(pooled.end(), r.latency_samples_us.begin(), r.latency_samples_us.end());
        per_run_tput.push_back(r.aggregate_goodput_bps);
        s.mean_aggregate_throughput_bps += r.aggregate_goodput_bps;
        idle_us += r.tally(ChannelOutcome::idle).span_us;
        for (const ChannelTally& t : r.channel) total_us += t.span_us;
        s.total_slots += r.slot_count;
        discards += static_cast<double>(r.data_frames_discarded);
    }
    s.mean_aggregate_throughput_bps /= static_cast<double>(runs.size());
    s.mean_data_frames_discarded = discards / static_cast<double>(runs.size());
    s.latency_us = summarize_samples(std::move(pooled));
    s.per_run_throughput_bps = summarize_samples(std::move(per_run_tput));
    s.failures = failure_rate(runs);
    if (total_us > 0) {
        s.idle_fraction = idle_us / total_us;
        s.busy_fraction = 1.0 - s.idle_fraction;
    }
    return s;
}

// Cross-engine comparison for one scenario point.
struct EngineComparison {
    double analytic_latency_us = 0, sim_latency_us = 0;
    double latency_rel_error = 0;  // (analytic - sim) / sim
    bool latency_flagged = false;
    double analytic_throughput_bps = 0, sim_throughput_bps = 0;
    double throughput_rel_error = 0;
    bool throughput_flagged = false;
    double threshold = 0.15;
};

inline double relative_error(double a, double b) {
    if (b == 0.0) return a == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (a - b) / b;
}

inline EngineComparison compare_engines(const AnalyticPoint& analytic,
                                        const CampaignSummary& sim,
                                        double threshold = 0.15) {
    EngineComparison c;
    c.threshold = threshold;
    c.analytic_latency_us = analytic.latency_us;
    c.sim_latency_us = sim.latency_us.mean;
    c.latency_rel_error = relative_error(c.analytic_latency_us, c.sim_latency_us);
    c.latency_flagged = std::abs(c.latency_rel_error) > threshold;
    c.analytic_throughput_bps = analytic.aggregate_throughput_bps;
    c.sim_throughput_bps = sim.mean_aggregate_throughput_bps;
    c.throughput_rel_error = relative_error(c.analytic_throughput_bps, c.sim_throughput_bps);
    c.throughput_flagged = std::abs(c.throughput_rel_error) > threshold;
    return c;
}

}  // namespace coex
