#pragma once
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "coex/config.hpp"
#include "coex/estimators.hpp"
#include "coex/metrics.hpp"
#include "coex/sim.hpp"

namespace coex {

// --- logging (COEX_LOG: 0 = quiet, 1 = progress, 2 = debug) ---

inline int log_level() {
    static const int level = [] {
        const char* v = std::getenv("COEX_LOG");
        if (!v) return 0;
        return std::atoi(v);
    }();
    return level;
}

inline void log_line(int level, const std::string& msg) {
    if (log_level() >= level) std::fprintf(stderr, "[coex] %s\n", msg.c_str());
}

// --- sweeps ---

enum class SweepAxis { n_bf, n_ax, interval, edca_class, antenna, rate };

inline SweepAxis sweep_axis_by_name(const std::string& name) {
    if (name == "n_bf") return SweepAxis::n_bf;
    if (name == "n_ax") return SweepAxis::n_ax;
    if (name == "interval") return SweepAxis::interval;
    if (name == "edca_class") return SweepAxis::edca_class;
    if (name == "antenna") return SweepAxis::antenna;
    if (name == "rate") return SweepAxis::rate;
    throw InvalidParameter("unknown sweep axis '" + name +
                           "' (use n_bf, n_ax, interval, edca_class, antenna, rate)");
}

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::n_bf: return "n_bf";
        case SweepAxis::n_ax: return "n_ax";
        case SweepAxis::interval: return "interval";
        case SweepAxis::edca_class: return "edca_class";
        case SweepAxis::antenna: return "antenna";
        case SweepAxis::rate: return "rate";
    }
    return "?";
}

namespace detail {

inline int parse_int_value(const std::string& v, const std::string& what) {
    try {
        size_t pos = 0;
        const int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw InvalidParameter(what + ": expected an integer, got '" + v + "'");
    }
}

inline double parse_double_value(const std::string& v, const std::string& what) {
    try {
        size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw InvalidParameter(what + ": expected a number, got '" + v + "'");
    }
}

// Filename-safe scenario-id fragment.
inline std::string slug(std::string s) {
    for (char& c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
        if (!ok) c = '_';
    }
    return s;
}

}  // namespace detail

// Apply one sweep value to a copy of the base configuration. Interval is in
// milliseconds; edca_class reassigns the sensing AP's access class; antenna
// takes "TXxRX"; rate is in bits/us.
inline ScenarioConfig apply_sweep_value(ScenarioConfig cfg, SweepAxis axis,
                                        const std::string& value) {
    switch (axis) {
        case SweepAxis::n_bf:
            cfg.population.n_bf_aps = detail::parse_int_value(value, "sweep n_bf");
            break;
        case SweepAxis::n_ax:
            cfg.population.n_ax_aps = detail::parse_int_value(value, "sweep n_ax");
            break;
        case SweepAxis::interval:
            cfg.interval_us = detail::parse_double_value(value, "sweep interval") * 1e3;
            break;
        case SweepAxis::edca_class:
            cfg.population.edca_bf = edca_by_name(value);
            break;
        case SweepAxis::antenna: {
            nlohmann::json j = value;
            detail::parse_antenna(j, cfg.sensing, "sweep antenna");
            break;
        }
        case SweepAxis::rate:
            cfg.timing.rate_R = detail::parse_double_value(value, "sweep rate");
            break;
    }
    cfg.validate();
    return cfg;
}

// One grid point of a campaign. A point may pin the analytic regime (a sweep
// over aligned sensing networks wants the burst-drain estimator on its whole
// axis, including the single-network end).
struct ScenarioPoint {
    std::string id;
    ScenarioConfig config;
    std::optional<AnalyticRegime> regime;
};

inline std::vector<ScenarioPoint> sweep_points(const ScenarioConfig& base, SweepAxis axis,
                                               const std::vector<std::string>& values,
                                               const std::string& id_prefix = "sweep") {
    if (values.empty()) throw InvalidParameter("sweep: empty value list");
    std::vector<ScenarioPoint> pts;
    pts.reserve(values.size());
    for (const std::string& v : values) {
        ScenarioPoint p;
        p.config = apply_sweep_value(base, axis, v);
        p.id = id_prefix + "__" + to_string(axis) + "_" + detail::slug(v);
        pts.push_back(std::move(p));
    }
    return pts;
}

// --- execution ---

struct PointResult {
    ScenarioPoint point;
    bool has_analytic = false;
    AnalyticPoint analytic;
    bool has_sim = false;
    CampaignSummary sim;
    std::vector<RunMetrics> runs;  // ordered by seed index
    bool has_comparison = false;
    EngineComparison comparison;
};

namespace detail {

inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// Run one scenario point: every seed through the simulator (in parallel,
// results ordered by seed index), the analytic engine once, and the
// cross-engine comparison when both ran.
inline PointResult run_point(const ScenarioPoint& pt, int threads = 1) {
    PointResult r;
    r.point = pt;
    const ScenarioConfig& cfg = pt.config;
    log_line(1, "point " + pt.id);
    if (cfg.mode != RunMode::sim) {
        r.analytic = pt.regime ? analytic_point(cfg, *pt.regime) : analytic_point(cfg);
        r.has_analytic = true;
    }
    if (cfg.mode != RunMode::analytic) {
        r.runs.resize(cfg.seeds.size());
        detail::parallel_for(cfg.seeds.size(), threads, [&](std::size_t i) {
            r.runs[i] = simulate(cfg, cfg.seeds[i]);
        });
        r.sim = summarize(r.runs);
        r.has_sim = true;
    }
    if (r.has_analytic && r.has_sim) {
        r.comparison = compare_engines(r.analytic, r.sim);
        r.has_comparison = true;
    }
    return r;
}

inline std::vector<PointResult> run_campaign(const std::vector<ScenarioPoint>& points,
                                             int threads = 1) {
    std::vector<PointResult> out;
    out.reserve(points.size());
    for (const ScenarioPoint& p : points) out.push_back(run_point(p, threads));
    return out;
}

// --- presets ---

// The calibrated operating point shared by all study presets: 20 MHz-class
// rate (60 bits/us), 50 us sensing frames, two sensing responders, single
// antenna, 8-bit feedback over 242 tones, TXOP 5484 us, best-effort access
// on both technologies, 100 ms request interval, aligned epochs, 10 s runs,
// 50 seeds.
inline ScenarioConfig calibrated_baseline() {
    ScenarioConfig cfg;
    cfg.population.n_bf_aps = 1;
    cfg.population.n_ax_aps = 1;
    cfg.population.stas_per_bf = 2;
    cfg.population.stas_per_ax = 1;
    cfg.population.edca_bf = edca_be();
    cfg.population.edca_ax = edca_be();
    cfg.timing.rate_R = 60.0;
    cfg.timing.txop_limit = 5484.0;
    cfg.sensing.n_tx = 1;
    cfg.sensing.n_rx = 1;
    cfg.sensing.n_sc = 242;
    cfg.sensing.n_b = 8;
    cfg.sensing.n_sta_participants_N = 2;
    cfg.sensing.t_polling = cfg.sensing.t_cts = cfg.sensing.t_ndpa = cfg.sensing.t_ndp = 50.0;
    cfg.sensing.report_phy_header = true;
    cfg.arrival_mode = ArrivalMode::periodic;
    cfg.interval_us = 100e3;
    cfg.startup_jitter_us = 0.0;
    cfg.duration_s = 10.0;
    cfg.seeds = ScenarioConfig::default_seeds();
    cfg.mode = RunMode::both;
    return cfg;
}

namespace detail {
inline std::vector<std::uint64_t> seed_range(int n) {
    std::vector<std::uint64_t> s(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<size_t>(i)] = static_cast<std::uint64_t>(i + 1);
    return s;
}
}  // namespace detail

// Growing sensing-network count against one data network (aligned epochs
// drain as a burst; the analytic regime is pinned accordingly).
inline std::vector<ScenarioPoint> preset_sensing_networks() {
    std::vector<std::string> values;
    for (int n = 1; n <= 9; ++n) values.push_back(std::to_string(n));
    std::vector<ScenarioPoint> pts =
        sweep_points(calibrated_baseline(), SweepAxis::n_bf, values, "sensing_networks");
    for (ScenarioPoint& p : pts) p.regime = AnalyticRegime::burst;
    return pts;
}

// One sensing network against a growing data population.
inline std::vector<ScenarioPoint> preset_data_networks() {
    std::vector<std::string> values;
    for (int n = 1; n <= 9; ++n) values.push_back(std::to_string(n));
    std::vector<ScenarioPoint> pts =
        sweep_points(calibrated_baseline(), SweepAxis::n_ax, values, "data_networks");
    for (ScenarioPoint& p : pts) p.regime = AnalyticRegime::stationary;
    return pts;
}

// Failure-rate grid: sensing networks 1..5 crossed with request intervals
// {10, 50, 100, 500, 1000} ms. Long runs and a wide seed set keep the grid's
// orderings out of sampling noise.
inline std::vector<ScenarioPoint> preset_interval_grid(int seed_count = 256,
                                                       double duration_s = 30.0) {
    ScenarioConfig base = calibrated_baseline();
    base.seeds = detail::seed_range(seed_count);
    base.duration_s = duration_s;
    const int interval_ms[] = {10, 50, 100, 500, 1000};
    std::vector<ScenarioPoint> pts;
    for (int nbf = 1; nbf <= 5; ++nbf) {
        for (int ms : interval_ms) {
            ScenarioPoint p;
            p.config = base;
            p.config.population.n_bf_aps = nbf;
            p.config.interval_us = ms * 1e3;
            p.id = "interval_grid__n_bf_" + std::to_string(nbf) + "__interval_ms_" +
                   std::to_string(ms);
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

// Access-class study: the sensing AP takes each class in turn.
inline std::vector<ScenarioPoint> preset_access_classes() {
    return sweep_points(calibrated_baseline(), SweepAxis::edca_class,
                        {"VO", "VI", "BE", "BK"}, "access_classes");
}

// Antenna study: square arrays grow the feedback report.
inline std::vector<ScenarioPoint> preset_antenna_sizes() {
    return sweep_points(calibrated_baseline(), SweepAxis::antenna,
                        {"1x1", "2x2", "4x4", "8x8", "16x16"}, "antenna_sizes");
}

// Slot-frequency check: both populations saturated, identical simple access
// parameters (window 32, no AIFS), the four small population corners.
inline std::vector<ScenarioPoint> preset_slot_mix() {
    ScenarioConfig base = calibrated_baseline();
    const EdcaClass simple{32, 2048, 0, 6};
    base.population.edca_bf = simple;
    base.population.edca_ax = simple;
    base.arrival_mode = ArrivalMode::continuous;
    base.duration_s = 100.0;
    base.seeds = {1};
    std::vector<ScenarioPoint> pts;
    for (int nbf : {1, 3}) {
        for (int nax : {1, 3}) {
            ScenarioPoint p{"slot_mix__n_bf_" + std::to_string(nbf) + "__n_ax_" +
                                std::to_string(nax),
                            base, std::nullopt};
            p.config.population.n_bf_aps = nbf;
            p.config.population.n_ax_aps = nax;
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

inline std::vector<ScenarioPoint> preset_points(const std::string& name) {
    if (name == "sensing-networks") return preset_sensing_networks();
    if (name == "data-networks") return preset_data_networks();
    if (name == "interval-grid") return preset_interval_grid();
    if (name == "access-classes") return preset_access_classes();
    if (name == "antenna-sizes") return preset_antenna_sizes();
    if (name == "slot-mix") return preset_slot_mix();
    throw InvalidParameter(
        "unknown preset '" + name +
        "' (use sensing-networks, data-networks, interval-grid, access-classes, "
        "antenna-sizes, slot-mix)");
}

// --- emission ---

namespace detail {

inline std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline void summary_rows(std::string& out, const PointResult& r) {
    auto row = [&](const std::string& metric, double mean, double median, double p5, double p25,
                   double p75, double p95, long long n) {
        out += r.point.id;
        out += ',';
        out += metric;
        out += ',';
        out += fmt_g(mean);
        out += ',';
        out += fmt_g(median);
        out += ',';
        out += fmt_g(p5);
        out += ',';
        out += fmt_g(p25);
        out += ',';
        out += fmt_g(p75);
        out += ',';
        out += fmt_g(p95);
        out += ',';
        out += std::to_string(n);
        out += '\n';
    };
    if (r.has_sim) {
        const DistributionSummary& L = r.sim.latency_us;
        if (!L.empty)
            row("latency_us", L.mean, L.median, L.p5, L.p25, L.p75, L.p95,
                static_cast<long long>(L.n_samples));
        const DistributionSummary& T = r.sim.per_run_throughput_bps;
        row("throughput_bps", r.sim.mean_aggregate_throughput_bps, T.median, T.p5, T.p25, T.p75,
            T.p95, static_cast<long long>(r.sim.run_count));
        if (r.sim.failures.defined) {
            const double f = r.sim.failures.percent;
            row("failure_rate_pct", f, f, f, f, f, f, r.sim.failures.attempted);
        }
    }
    if (r.has_analytic) {
        const AnalyticPoint& a = r.analytic;
        row("analytic_latency_us", a.latency_us, a.latency_us, a.latency_us, a.latency_us,
            a.latency_us, a.latency_us, 1);
        row("analytic_throughput_bps", a.aggregate_throughput_bps, a.aggregate_throughput_bps,
            a.aggregate_throughput_bps, a.aggregate_throughput_bps, a.aggregate_throughput_bps,
            a.aggregate_throughput_bps, 1);
    }
    if (r.has_comparison) {
        row("latency_rel_error", r.comparison.latency_rel_error, r.comparison.latency_rel_error,
            r.comparison.latency_rel_error, r.comparison.latency_rel_error,
            r.comparison.latency_rel_error, r.comparison.latency_rel_error, 1);
        row("throughput_rel_error", r.comparison.throughput_rel_error,
            r.comparison.throughput_rel_error, r.comparison.throughput_rel_error,
            r.comparison.throughput_rel_error, r.comparison.throughput_rel_error,
            r.comparison.throughput_rel_error, 1);
    }
}

inline void histogram_rows(std::string& out, const PointResult& r) {
    if (!r.has_sim || r.sim.latency_us.empty) return;
    const Histogram& h = r.sim.latency_us.histogram;
    for (size_t i = 0; i < h.counts.size(); ++i) {
        out += r.point.id;
        out += ',';
        out += fmt_g(h.edges[i]);
        out += ',';
        out += fmt_g(h.edges[i + 1]);
        out += ',';
        out += std::to_string(h.counts[i]);
        out += '\n';
    }
}

}  // namespace detail

inline constexpr const char* summary_csv_header =
    "scenario_id,metric,mean,median,p5,p25,p75,p95,n\n";
inline constexpr const char* histogram_csv_header = "scenario_id,bin_lo,bin_hi,count\n";

inline std::string summary_csv(const std::vector<PointResult>& results) {
    std::string out = summary_csv_header;
    for (const PointResult& r : results) detail::summary_rows(out, r);
    return out;
}

inline std::string histogram_csv(const std::vector<PointResult>& results) {
    std::string out = histogram_csv_header;
    for (const PointResult& r : results) detail::histogram_rows(out, r);
    return out;
}

inline nlohmann::json summary_to_json(const CampaignSummary& s) {
    nlohmann::json j;
    j["latency_us"] = {{"mean", s.latency_us.mean},     {"median", s.latency_us.median},
                       {"p5", s.latency_us.p5},         {"p25", s.latency_us.p25},
                       {"p75", s.latency_us.p75},       {"p95", s.latency_us.p95},
                       {"n_samples", s.latency_us.n_samples},
                       {"empty", s.latency_us.empty}};
    j["throughput_bps"] = {{"mean", s.mean_aggregate_throughput_bps},
                           {"median", s.per_run_throughput_bps.median}};
    j["failure_rate_pct"] = s.failures.defined ? nlohmann::json(s.failures.percent)
                                               : nlohmann::json(nullptr);
    j["dropped"] = s.failures.dropped;
    j["attempted"] = s.failures.attempted;
    j["run_count"] = s.run_count;
    j["idle_fraction"] = s.idle_fraction;
    j["total_slots"] = s.total_slots;
    return j;
}

inline nlohmann::json result_to_json(const PointResult& r) {
    nlohmann::json j;
    j["scenario_id"] = r.point.id;
    j["config"] = config_to_json(r.point.config);
    if (r.has_analytic) {
        j["analytic"] = {{"regime", to_string(r.analytic.regime)},
                         {"latency_us", r.analytic.latency_us},
                         {"aggregate_throughput_bps", r.analytic.aggregate_throughput_bps},
                         {"per_network_throughput_bps", r.analytic.per_network_throughput_bps},
                         {"raw_latency_us", r.analytic.raw_latency_us},
                         {"response_latency_us", r.analytic.response_latency_us},
                         {"censored_latency_us", r.analytic.censored_latency_us}};
    }
    if (r.has_sim) j["sim"] = summary_to_json(r.sim);
    if (r.has_comparison) {
        j["comparison"] = {{"latency_rel_error", r.comparison.latency_rel_error},
                           {"latency_flagged", r.comparison.latency_flagged},
                           {"throughput_rel_error", r.comparison.throughput_rel_error},
                           {"throughput_flagged", r.comparison.throughput_flagged},
                           {"threshold", r.comparison.threshold}};
    }
    return j;
}

// Write campaign outputs: per-scenario files scenario_<id>.<format>, plus
// campaign-level summary.csv and histograms.csv when CSV is requested.
// Identical inputs produce byte-identical files.
inline std::vector<std::string> emit(const std::vector<PointResult>& results, bool write_csv,
                                     bool write_json, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    std::vector<std::string> written;
    auto write_file = [&](const std::string& name, const std::string& content) {
        const std::string path = out_dir + "/" + name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot open " + path + " for writing");
        f << content;
        if (!f) throw IoError("write failed: " + path);
        written.push_back(path);
    };
    for (const PointResult& r : results) {
        if (write_csv) {
            std::string csv = summary_csv_header;
            detail::summary_rows(csv, r);
            write_file("scenario_" + r.point.id + ".csv", csv);
        }
        if (write_json)
            write_file("scenario_" + r.point.id + ".json", result_to_json(r).dump(2) + "\n");
    }
    if (write_csv) {
        write_file("summary.csv", summary_csv(results));
        write_file("histograms.csv", histogram_csv(results));
    }
    return written;
}

}  // namespace coex
