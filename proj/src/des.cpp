#include "forkjoin/des.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <queue>
#include <string>
#include <unordered_map>

#include "forkjoin/rng.hpp"

namespace forkjoin {

namespace {

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        return later_than(a, b);
    }
};

// One M/M/n branch with a FIFO queue. Channels are interchangeable; a queued
// job starts service the moment any channel frees up.
class Branch {
public:
    Branch(int channels, std::function<double()> draw_service)
        : channels_(channels), draw_(std::move(draw_service)) {}

    // Returns the completion event to schedule if the job starts service now.
    bool admit(std::int64_t job, double now, EventKind kind, Event& completion) {
        if (busy_ < channels_) {
            ++busy_;
            completion = Event{now + draw_(), kind, job};
            return true;
        }
        fifo_.push_back(job);
        return false;
    }

    // Called when a job completes; hands the freed channel to the FIFO head.
    bool complete(double now, EventKind kind, Event& next_completion) {
        assert(busy_ >= 1);
        if (!fifo_.empty()) {
            const std::int64_t next = fifo_.front();
            fifo_.pop_front();
            next_completion = Event{now + draw_(), kind, next};
            return true;
        }
        --busy_;
        return false;
    }

    bool idle() const { return busy_ == 0 && fifo_.empty(); }

private:
    int channels_;
    std::function<double()> draw_;
    int busy_ = 0;
    std::deque<std::int64_t> fifo_;
};

} // namespace

double SimOutput::mean_occupancy() const {
    if (total_sim_time <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 1; k < occupancy_time.size(); ++k)
        acc += static_cast<double>(k) * occupancy_time[k];
    return acc / total_sim_time;
}

SimOutput simulate_trace(const SimInputs& in, int n_a, int n_b,
                         double warmup_fraction) {
    const std::int64_t jobs = static_cast<std::int64_t>(in.arrival_times.size());
    if (jobs < 1) fail("InvalidArgument", "need at least one arrival");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        fail("InvalidArgument", "warmup fraction must be in [0, 1)");
    if (n_a < 1 || n_b < 1) fail("ZeroChannels", "channel counts must be >= 1");

    if (!std::is_sorted(in.arrival_times.begin(), in.arrival_times.end()))
        fail("InvalidArgument", "arrival times must be nondecreasing");

    const std::int64_t warmup_jobs =
        static_cast<std::int64_t>(warmup_fraction * static_cast<double>(jobs));
    // Statistics window: from the first counted arrival to the last departure.
    const double stats_start =
        warmup_jobs == 0 ? 0.0
                         : in.arrival_times[static_cast<std::size_t>(warmup_jobs)];

    std::priority_queue<Event, std::vector<Event>, EventOrder> agenda;
    for (std::int64_t id = 0; id < jobs; ++id)
        agenda.push(Event{in.arrival_times[static_cast<std::size_t>(id)],
                          EventKind::ExternalArrival, id});

    Branch branch_a(n_a, in.service_a);
    Branch branch_b(n_b, in.service_b);

    // first partner of each pending pair: job id -> synchronizer entry time
    std::unordered_map<std::int64_t, double> waiting;
    waiting.reserve(1024);

    SimOutput out;
    out.in_trace.reserve(static_cast<std::size_t>(jobs - warmup_jobs));
    out.out_trace.reserve(static_cast<std::size_t>(jobs - warmup_jobs));
    out.sojourn_samples.reserve(static_cast<std::size_t>(jobs - warmup_jobs));

    double last_change = 0.0;     // time of the previous occupancy change
    double last_departure = 0.0;  // time of the latest pair departure

    auto account_occupancy = [&](double now) {
        const double from = std::max(last_change, stats_start);
        if (now > from) {
            const std::size_t k = waiting.size();
            if (out.occupancy_time.size() <= k) out.occupancy_time.resize(k + 1, 0.0);
            out.occupancy_time[k] += now - from;
        }
        last_change = now;
    };

    auto arrive_at_synchronizer = [&](std::int64_t job, double now) {
        account_occupancy(now);
        auto hit = waiting.find(job);
        if (hit == waiting.end()) {
            waiting.emplace(job, now);
            if (job >= warmup_jobs) out.in_trace.push_back(now);
        } else {
            const double entered = hit->second;
            waiting.erase(hit);
            last_departure = now;
            if (job >= warmup_jobs) {
                out.out_trace.push_back(now);
                out.sojourn_samples.push_back(now - entered);
                ++out.jobs_completed;
            }
        }
    };

    Event completion;
    while (!agenda.empty()) {
        const Event ev = agenda.top();
        agenda.pop();
        switch (ev.kind) {
            case EventKind::ExternalArrival:
                if (branch_a.admit(ev.job_id, ev.time, EventKind::ServiceCompletionA,
                                   completion))
                    agenda.push(completion);
                if (branch_b.admit(ev.job_id, ev.time, EventKind::ServiceCompletionB,
                                   completion))
                    agenda.push(completion);
                break;
            case EventKind::ServiceCompletionA:
                arrive_at_synchronizer(ev.job_id, ev.time);
                if (branch_a.complete(ev.time, EventKind::ServiceCompletionA,
                                      completion))
                    agenda.push(completion);
                break;
            case EventKind::ServiceCompletionB:
                arrive_at_synchronizer(ev.job_id, ev.time);
                if (branch_b.complete(ev.time, EventKind::ServiceCompletionB,
                                      completion))
                    agenda.push(completion);
                break;
        }
    }

    if (!branch_a.idle() || !branch_b.idle() || !waiting.empty())
        fail("Internal", "pairing invariant broken: network not drained");
    out.final_occupancy = static_cast<std::int64_t>(waiting.size());
    out.total_sim_time = std::max(0.0, last_departure - stats_start);
    if (out.occupancy_time.empty()) out.occupancy_time.resize(1, 0.0);
    return out;
}

SimOutput run_simulation(const NetworkParams& p, std::int64_t jobs,
                         std::uint64_t seed, double warmup_fraction) {
    validate_params(p);
    if (jobs < 1) fail("InvalidArgument", "need at least one job");

    RngStream arrivals(seed, "arrivals");
    auto service_a =
        std::make_shared<RngStream>(seed, "service-a");
    auto service_b =
        std::make_shared<RngStream>(seed, "service-b");

    SimInputs in;
    in.arrival_times = generate_arrival_times(p.lambda, jobs, arrivals);
    in.service_a = [stream = service_a, rate = p.mu_a] {
        return stream->exponential(rate);
    };
    in.service_b = [stream = service_b, rate = p.mu_b] {
        return stream->exponential(rate);
    };
    return simulate_trace(in, p.n_a, p.n_b, warmup_fraction);
}

IntervalSample extract_intervals(const std::vector<double>& trace) {
    if (trace.size() < 2)
        fail("TooFewEvents", "need at least 2 events to form intervals, got " +
                                 std::to_string(trace.size()));
    Eigen::ArrayXd intervals(static_cast<Eigen::Index>(trace.size()) - 1);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double d = trace[i] - trace[i - 1];
        if (d < 0.0) fail("InvalidArgument", "trace is not nondecreasing");
        intervals[static_cast<Eigen::Index>(i - 1)] = d;
    }
    return IntervalSample{std::move(intervals)};
}

Eigen::ArrayXd occupancy_distribution(const SimOutput& o) {
    if (o.total_sim_time <= 0.0)
        fail("EmptyObservation", "no observed time to form an occupancy pmf");
    Eigen::ArrayXd pmf(static_cast<Eigen::Index>(o.occupancy_time.size()));
    for (std::size_t k = 0; k < o.occupancy_time.size(); ++k)
        pmf[static_cast<Eigen::Index>(k)] = o.occupancy_time[k] / o.total_sim_time;
    return pmf;
}

double mean_sojourn(const SimOutput& o) {
    if (o.sojourn_samples.empty())
        fail("EmptyObservation", "no sojourn samples recorded");
    double acc = 0.0;
    for (double t : o.sojourn_samples) acc += t;
    return acc / static_cast<double>(o.sojourn_samples.size());
}

double empirical_rate(const std::vector<double>& trace) {
    if (trace.size() < 2)
        fail("TooFewEvents", "rate estimate needs at least 2 events");
    const double span = trace.back() - trace.front();
    if (span <= 0.0) fail("EmptyObservation", "trace spans zero time");
    return static_cast<double>(trace.size() - 1) / span;
}

} // namespace forkjoin
