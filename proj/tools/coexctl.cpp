// coexctl — command-line front end of the coexistence laboratory.
//
// Runs the analytic engine, the slot-level simulator, or both, over a single
// scenario, a one-axis sweep, or a named study preset, and writes CSV/JSON
// results. Exit codes: 0 success, 2 validation, 3 convergence, 4 I/O,
// 5 model error.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coex/campaign.hpp"
#include "coex/config.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    const std::vector<std::string> parts = split_commas(s);
    std::vector<std::uint64_t> seeds;
    if (parts.size() == 1 && parts[0].find(',') == std::string::npos) {
        // A single number N means seeds 1..N.
        const long n = std::stol(parts[0]);
        if (n < 1) throw coex::InvalidParameter("--seeds: need at least one seed");
        for (long i = 1; i <= n; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
        return seeds;
    }
    for (const std::string& p : parts) seeds.push_back(std::stoull(p));
    return seeds;
}

void print_point(const coex::PointResult& r) {
    std::printf("%s\n", r.point.id.c_str());
    if (r.has_analytic) {
        std::printf("  analytic [%s]: latency %.3f ms, throughput %.2f Mbit/s\n",
                    coex::to_string(r.analytic.regime), r.analytic.latency_us / 1e3,
                    r.analytic.aggregate_throughput_bps / 1e6);
    }
    if (r.has_sim) {
        if (!r.sim.latency_us.empty) {
            std::printf("  sim: latency mean %.3f ms, median %.3f ms (n=%zu)\n",
                        r.sim.latency_us.mean / 1e3, r.sim.latency_us.median / 1e3,
                        r.sim.latency_us.n_samples);
        } else {
            std::printf("  sim: no completed sensing sessions\n");
        }
        std::printf("  sim: throughput %.2f Mbit/s", r.sim.mean_aggregate_throughput_bps / 1e6);
        if (r.sim.failures.defined)
            std::printf(", failure rate %.2f%%", r.sim.failures.percent);
        std::printf(" (%zu runs)\n", r.sim.run_count);
    }
    if (r.has_comparison) {
        std::printf("  engines: latency %+.1f%%%s, throughput %+.1f%%%s\n",
                    100.0 * r.comparison.latency_rel_error,
                    r.comparison.latency_flagged ? " [FLAGGED]" : "",
                    100.0 * r.comparison.throughput_rel_error,
                    r.comparison.throughput_flagged ? " [FLAGGED]" : "");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coexctl: wireless sensing / data coexistence laboratory"};
    std::string config_path, mode_str, sweep_str, preset, seeds_str, format = "both";
    std::string out_dir = "out";
    int threads = 1;
    app.add_option("--config", config_path, "scenario configuration (JSON)");
    app.add_option("--mode", mode_str, "analytic, sim or both (overrides the config)");
    app.add_option("--sweep", sweep_str,
                   "AXIS=v1,v2,... with AXIS in {n_bf, n_ax, interval, edca_class, antenna, "
                   "rate}; interval values in ms");
    app.add_option("--preset", preset,
                   "named study: sensing-networks, data-networks, interval-grid, "
                   "access-classes, antenna-sizes, slot-mix");
    app.add_option("--seeds", seeds_str, "N for seeds 1..N, or a comma list");
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--threads", threads, "parallel seed workers (default: 1)");
    app.add_option("--format", format, "csv, json or both (default: both)");
    CLI11_PARSE(app, argc, argv);

    try {
        if (format != "csv" && format != "json" && format != "both")
            throw coex::InvalidParameter("--format: expected csv, json or both");

        coex::ScenarioConfig base =
            config_path.empty() ? coex::ScenarioConfig{} : coex::load_config(config_path);
        if (!mode_str.empty()) {
            if (mode_str == "analytic")
                base.mode = coex::RunMode::analytic;
            else if (mode_str == "sim")
                base.mode = coex::RunMode::sim;
            else if (mode_str == "both")
                base.mode = coex::RunMode::both;
            else
                throw coex::InvalidParameter("--mode: expected analytic, sim or both");
        }
        if (!seeds_str.empty()) base.seeds = parse_seeds(seeds_str);

        std::vector<coex::ScenarioPoint> points;
        if (!preset.empty()) {
            points = coex::preset_points(preset);
            for (coex::ScenarioPoint& p : points) {
                if (!mode_str.empty()) p.config.mode = base.mode;
                if (!seeds_str.empty()) p.config.seeds = base.seeds;
            }
        } else if (!sweep_str.empty()) {
            const size_t eq = sweep_str.find('=');
            if (eq == std::string::npos)
                throw coex::InvalidParameter("--sweep: expected AXIS=v1,v2,...");
            const coex::SweepAxis axis = coex::sweep_axis_by_name(sweep_str.substr(0, eq));
            points = coex::sweep_points(base, axis, split_commas(sweep_str.substr(eq + 1)));
        } else {
            base.validate();
            points.push_back({"scenario", base, std::nullopt});
        }

        const std::vector<coex::PointResult> results = coex::run_campaign(points, threads);
        for (const coex::PointResult& r : results) print_point(r);
        const std::vector<std::string> files = coex::emit(
            results, format != "json", format != "csv", out_dir);
        std::printf("wrote %zu files to %s\n", files.size(), out_dir.c_str());
        return 0;
    } catch (const coex::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
