#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "forkjoin/params.hpp"
#include "forkjoin/stats.hpp"

namespace forkjoin {

// Event-driven simulation of fork -> {M/M/n_a; M/M/n_b} -> synchronizer.
//
// Every external arrival forks into one copy per branch. Branches serve FIFO
// with n parallel channels; service times are drawn when a job enters
// service. A completed copy goes to the synchronizer: the first partner of a
// pair is stored, the second releases the pair instantly. The first-partner
// arrival stream is the synchronizer input flow in(S0), the second-partner
// stream is the output flow out(S0).

enum class EventKind : int {
    ServiceCompletionA = 0,
    ServiceCompletionB = 1,
    ExternalArrival = 2,
};

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::ExternalArrival;
    std::int64_t job_id = 0;
};

// Simultaneous events drain completions before arrivals, then by job id.
inline bool later_than(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.job_id > b.job_id;
}

struct SimOutput {
    std::vector<double> in_trace;         // first-partner arrival times
    std::vector<double> out_trace;        // second-partner arrival times
    std::vector<double> sojourn_samples;  // per pair, t_second - t_first
    std::vector<double> occupancy_time;   // index k -> time with K(S0) == k
    double total_sim_time = 0.0;          // measured window length
    std::int64_t jobs_completed = 0;      // pairs departed inside the window
    std::int64_t final_occupancy = 0;     // pairs still waiting at the end

    // Time-average synchronizer occupancy over the measured window.
    double mean_occupancy() const;
};

// Raw simulation inputs: explicit arrival instants plus one service-time
// source per branch, consumed in service-start order. Lets tests inject
// deterministic schedules.
struct SimInputs {
    std::vector<double> arrival_times;
    std::function<double()> service_a;
    std::function<double()> service_b;
};

// Runs the network over the given inputs. Statistics skip the first
// floor(warmup_fraction * jobs) arrivals; the run always drains until every
// admitted pair has departed.
SimOutput simulate_trace(const SimInputs& in, int n_a, int n_b,
                         double warmup_fraction);

// Seeded end-to-end run over `jobs` Poisson arrivals. Streams "arrivals",
// "service-a" and "service-b" are derived from the seed, so identical
// (params, jobs, seed, warmup) give bit-identical output.
SimOutput run_simulation(const NetworkParams& p, std::int64_t jobs,
                         std::uint64_t seed, double warmup_fraction = 0.1);

// Successive differences of a timestamp trace (needs at least 2 events).
IntervalSample extract_intervals(const std::vector<double>& trace);

// Empirical pmf of the synchronizer occupancy, time-weighted.
Eigen::ArrayXd occupancy_distribution(const SimOutput& o);

// Arithmetic mean of the pair sojourn times.
double mean_sojourn(const SimOutput& o);

// Event rate of a trace, (n - 1) / (t_last - t_first).
double empirical_rate(const std::vector<double>& trace);

} // namespace forkjoin
