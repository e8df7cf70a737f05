#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "coex/durations.hpp"
#include "coex/rng.hpp"
#include "coex/types.hpp"

namespace coex {

enum class Technology { sensing, data };

// Per-slot channel outcome kinds.
enum class ChannelOutcome : int {
    idle = 0,
    success_data = 1,
    success_sensing = 2,
    collision_data = 3,
    collision_sensing = 4,
    collision_cross = 5,
};
constexpr int channel_outcome_count = 6;

inline const char* to_string(ChannelOutcome o) {
    switch (o) {
        case ChannelOutcome::idle: return "idle";
        case ChannelOutcome::success_data: return "success_data";
        case ChannelOutcome::success_sensing: return "success_sensing";
        case ChannelOutcome::collision_data: return "collision_data";
        case ChannelOutcome::collision_sensing: return "collision_sensing";
        case ChannelOutcome::collision_cross: return "collision_cross";
    }
    return "?";
}

struct ChannelTally {
    std::int64_t count = 0;
    double span_us = 0;  // clipped at the configured horizon
};

// Raw results of one simulation run.
struct RunMetrics {
    std::vector<double> latency_samples_us;  // completed sensing sessions only
    std::int64_t dropped_count = 0;          // sensing requests that failed
    std::int64_t attempted_count = 0;        // sensing requests assessed
    std::int64_t arrival_count = 0;          // sensing requests issued
    std::vector<double> per_ap_goodput_bps;  // one entry per data AP
    double aggregate_goodput_bps = 0;
    std::vector<double> service_samples_us;  // MAC activation -> completion
    std::array<ChannelTally, channel_outcome_count> channel{};
    double duration_us = 0;   // configured horizon; tally spans sum to this
    double sim_time_us = 0;   // actual final clock (>= duration_us)
    std::int64_t slot_count = 0;
    std::int64_t data_frames_discarded = 0;

    const ChannelTally& tally(ChannelOutcome o) const {
        return channel[static_cast<size_t>(o)];
    }
};

// One access point's MAC state.
struct ApState {
    Technology tech = Technology::data;
    EdcaClass edca{};
    Rng rng{0, 0};
    int stage = 0;
    std::int64_t counter = 0;
    int aifs_remaining = 0;

    // Sensing request queue: one in MAC service, at most one waiting (a newer
    // arrival replaces a staler waiter), plus the last completed exchange
    // held until the next arrival assesses it.
    bool mac_busy = false;
    double active_arrival = 0;
    double activation_time = 0;
    bool has_waiting = false;
    double waiting_arrival = 0;
    bool has_done = false;
    double done_arrival = 0;
    double done_at = 0;
    bool arrivals_open = false;
    double next_arrival = 0;
    bool has_prev = false;
    double prev_arrival = 0;

    // Data bookkeeping.
    double delivered_bits = 0;
    int failed_attempts = 0;  // consecutive collisions of the current frame

    bool contending() const { return tech == Technology::data || mac_busy; }

    void draw_backoff() {
        counter = static_cast<std::int64_t>(
            rng.bounded(static_cast<std::uint64_t>(edca.window(stage))));
        aifs_remaining = edca.aifs;
    }
};

// Slot-level coexistence simulator. One instance = one run (config + seed);
// equal inputs reproduce bit-identical results.
class Simulator {
public:
    Simulator(const ScenarioConfig& cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {
        cfg_.validate();
        d_ = event_durations(cfg_);
        horizon_us_ = cfg_.duration_s * 1e6;
        const int nbf = cfg_.population.n_bf_aps, nax = cfg_.population.n_ax_aps;
        aps_.reserve(static_cast<size_t>(nbf + nax));
        for (int i = 0; i < nbf; ++i) {
            ApState ap;
            ap.tech = Technology::sensing;
            ap.edca = cfg_.population.edca_bf;
            ap.rng = Rng(seed, static_cast<std::uint64_t>(i));
            init_sensing_arrivals(ap);
            aps_.push_back(ap);
        }
        for (int i = 0; i < nax; ++i) {
            ApState ap;
            ap.tech = Technology::data;
            ap.edca = cfg_.population.edca_ax;
            ap.rng = Rng(seed, static_cast<std::uint64_t>(nbf + i));
            ap.draw_backoff();
            aps_.push_back(ap);
        }
    }

    // --- single-slot machinery, exposed for direct testing ---

    // Settle the fate of the previous request of this AP at epoch t: a
    // completed exchange counts as success iff it finished by t (the next
    // request's arrival is the deadline); a request still in service or
    // still waiting is dropped.
    void drop_expired(ApState& ap, double t) {
        if (!ap.has_prev) return;
        const double prev = ap.prev_arrival;
        if (ap.has_done && ap.done_arrival == prev) {
            ++metrics_.attempted_count;
            if (ap.done_at <= t)
                metrics_.latency_samples_us.push_back(ap.done_at - prev);
            else
                ++metrics_.dropped_count;
            ap.has_done = false;
        } else if ((ap.mac_busy && ap.active_arrival == prev) ||
                   (ap.has_waiting && ap.waiting_arrival == prev)) {
            ++metrics_.dropped_count;
            ++metrics_.attempted_count;
        }
    }

    // Process all sensing-request arrivals due at or before the current
    // clock: assess the previous request, enqueue the new one (a free MAC
    // starts a fresh stage-0 backoff; otherwise the waiting room takes it,
    // replacing any staler waiter), and schedule the next epoch.
    void sensing_arrivals() {
        for (ApState& ap : aps_) {
            if (ap.tech != Technology::sensing) continue;
            while (ap.arrivals_open && ap.next_arrival <= now_) {
                const double t = ap.next_arrival;
                drop_expired(ap, t);
                ++metrics_.arrival_count;
                if (!ap.mac_busy) {
                    ap.mac_busy = true;
                    ap.active_arrival = t;
                    ap.activation_time = t;
                    ap.stage = 0;
                    ap.draw_backoff();
                } else {
                    ap.has_waiting = true;
                    ap.waiting_arrival = t;
                }
                ap.has_prev = true;
                ap.prev_arrival = t;
                ap.next_arrival = cfg_.arrival_mode == ArrivalMode::periodic
                                      ? t + cfg_.interval_us
                                      : t + ap.rng.exponential(cfg_.interval_us);
            }
        }
    }

    // Indices of the APs transmitting in this slot: contenders whose AIFS
    // countdown and backoff counter have both reached zero.
    std::vector<int> arbitrate_slot() const {
        std::vector<int> tx;
        for (size_t i = 0; i < aps_.size(); ++i) {
            const ApState& ap = aps_[i];
            if (ap.contending() && ap.aifs_remaining == 0 && ap.counter == 0)
                tx.push_back(static_cast<int>(i));
        }
        return tx;
    }

    // Idle slot: every contender first burns remaining AIFS, then decrements
    // its backoff counter.
    void freeze_and_decrement() {
        for (ApState& ap : aps_) {
            if (!ap.contending()) continue;
            if (ap.aifs_remaining > 0)
                --ap.aifs_remaining;
            else if (ap.counter > 0)
                --ap.counter;
        }
    }

    // Collision: every transmitter climbs one backoff stage and redraws. A
    // data frame is discarded after exhausting its attempts (stage resets to
    // zero and a fresh frame takes over); a sensing session persists at the
    // top stage (its deadline, the next request, is the natural abort).
    void on_collision(const std::vector<int>& tx) {
        for (int i : tx) {
            ApState& ap = aps_[static_cast<size_t>(i)];
            if (ap.tech == Technology::data) {
                ++ap.failed_attempts;
                if (ap.failed_attempts > ap.edca.retry_limit_L) {
                    ap.failed_attempts = 0;
                    ap.stage = 0;
                    ++metrics_.data_frames_discarded;
                } else {
                    ap.stage = std::min(ap.stage + 1, ap.edca.retry_limit_L);
                }
            } else {
                ap.stage = std::min(ap.stage + 1, ap.edca.retry_limit_L);
            }
            ap.draw_backoff();
        }
    }

    // Advance the simulation by one channel event. Returns the outcome.
    ChannelOutcome step() {
        sensing_arrivals();
        const std::vector<int> tx = arbitrate_slot();
        ChannelOutcome outcome;
        double span;
        if (tx.empty()) {
            outcome = ChannelOutcome::idle;
            span = d_.sigma;
            freeze_and_decrement();
        } else if (tx.size() == 1) {
            ApState& ap = aps_[static_cast<size_t>(tx[0])];
            if (ap.tech == Technology::data) {
                outcome = ChannelOutcome::success_data;
                span = d_.t_s_ax;
                ap.delivered_bits +=
                    static_cast<double>(d_.ax_mpdu_effective) * cfg_.traffic.msdu_bits;
                ap.failed_attempts = 0;
                ap.stage = 0;
                ap.draw_backoff();
            } else {
                outcome = ChannelOutcome::success_sensing;
                span = d_.t_s_bf;
                ap.has_done = true;
                ap.done_arrival = ap.active_arrival;
                ap.done_at = now_ + d_.t_f_bf;  // exchange ends before the trailing gap
                metrics_.service_samples_us.push_back(ap.done_at - ap.activation_time);
                ap.mac_busy = false;
                ap.stage = 0;
                if (cfg_.arrival_mode == ArrivalMode::continuous) {
                    ap.mac_busy = true;
                    ap.active_arrival = now_ + d_.t_s_bf;
                    ap.activation_time = now_ + d_.t_s_bf;
                    ap.draw_backoff();
                } else if (ap.has_waiting) {
                    ap.mac_busy = true;
                    ap.active_arrival = ap.waiting_arrival;
                    ap.activation_time = now_ + d_.t_s_bf;
                    ap.has_waiting = false;
                    ap.draw_backoff();
                }
            }
            rearm_others(tx);
        } else {
            bool any_data = false, any_sensing = false;
            for (int i : tx) {
                if (aps_[static_cast<size_t>(i)].tech == Technology::data)
                    any_data = true;
                else
                    any_sensing = true;
            }
            if (any_data && any_sensing) {
                outcome = ChannelOutcome::collision_cross;
                span = d_.t_c_cross;
            } else if (any_data) {
                outcome = ChannelOutcome::collision_data;
                span = d_.t_c_ax;
            } else {
                outcome = ChannelOutcome::collision_sensing;
                span = d_.t_c_bf;
            }
            on_collision(tx);
            rearm_others(tx);
        }
        ChannelTally& tally = metrics_.channel[static_cast<size_t>(outcome)];
        ++tally.count;
        tally.span_us += now_ + span > horizon_us_ ? horizon_us_ - now_ : span;
        now_ += span;
        ++metrics_.slot_count;
        return outcome;
    }

    // Run to the configured horizon and assemble the metrics.
    RunMetrics run() {
        while (now_ < horizon_us_) step();
        metrics_.duration_us = horizon_us_;
        metrics_.sim_time_us = now_;
        metrics_.per_ap_goodput_bps.clear();
        for (const ApState& ap : aps_) {
            if (ap.tech != Technology::data) continue;
            metrics_.per_ap_goodput_bps.push_back(ap.delivered_bits * 1e6 / now_);
            metrics_.aggregate_goodput_bps += metrics_.per_ap_goodput_bps.back();
        }
        if (cfg_.arrival_mode == ArrivalMode::continuous) {
            // Saturated sensing has no request deadlines: the service times
            // are the session latencies.
            metrics_.latency_samples_us = metrics_.service_samples_us;
            metrics_.attempted_count =
                static_cast<std::int64_t>(metrics_.service_samples_us.size());
            metrics_.dropped_count = 0;
        }
        return metrics_;
    }

    double now() const { return now_; }
    double horizon_us() const { return horizon_us_; }
    const DurationTable& durations() const { return d_; }
    const std::vector<ApState>& aps() const { return aps_; }
    std::vector<ApState>& aps() { return aps_; }
    const RunMetrics& metrics_so_far() const { return metrics_; }
    std::uint64_t seed() const { return seed_; }

private:
    void init_sensing_arrivals(ApState& ap) {
        switch (cfg_.arrival_mode) {
            case ArrivalMode::continuous:
                ap.mac_busy = true;
                ap.active_arrival = 0.0;
                ap.activation_time = 0.0;
                ap.stage = 0;
                ap.draw_backoff();
                break;
            case ArrivalMode::periodic:
                ap.arrivals_open = true;
                ap.next_arrival = cfg_.startup_jitter_us > 0
                                      ? ap.rng.uniform01() * cfg_.startup_jitter_us
                                      : 0.0;
                break;
            case ArrivalMode::poisson:
                ap.arrivals_open = true;
                ap.next_arrival = ap.rng.exponential(cfg_.interval_us);
                break;
        }
    }

    // After any busy slot, every contender that did not transmit re-arms its
    // AIFS countdown (transmitters re-armed via their own redraw).
    void rearm_others(const std::vector<int>& tx) {
        for (size_t i = 0; i < aps_.size(); ++i) {
            ApState& ap = aps_[i];
            if (!ap.contending()) continue;
            bool in_tx = false;
            for (int j : tx)
                if (static_cast<size_t>(j) == i) in_tx = true;
            if (!in_tx) ap.aifs_remaining = ap.edca.aifs;
        }
    }

    ScenarioConfig cfg_;
    std::uint64_t seed_;
    DurationTable d_{};
    std::vector<ApState> aps_;
    double now_ = 0.0;
    double horizon_us_ = 0.0;
    RunMetrics metrics_;
};

// Convenience wrapper: one complete run.
inline RunMetrics simulate(const ScenarioConfig& cfg, std::uint64_t seed) {
    return Simulator(cfg, seed).run();
}

}  // namespace coex
