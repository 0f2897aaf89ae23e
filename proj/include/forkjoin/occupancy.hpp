#pragma once

#include <cstdint>

#include "forkjoin/params.hpp"

namespace forkjoin {

// Synchronizer occupancy law for a Poisson input flow: the number of pairs
// waiting inside is Poisson with mean rho = lambda * mean sojourn time, the
// infinite-server stationary distribution. rho is a floor on the occupancy
// of any real synchronizer in the same network, whatever its internals.
struct OccupancyModel {
    double rho = 0.0;
};

// Poisson(rho) mass at k, computed in log space.
double occupancy_pmf(const OccupancyModel& m, std::int64_t k);

// P(occupancy > k_max); summed upward so tiny tails keep full precision.
double occupancy_tail(const OccupancyModel& m, std::int64_t k_max);

// Smallest memory size K with P(occupancy > K) < epsilon.
std::int64_t required_memory(double rho, double epsilon);

// P(branch queue length > q_max) for a stationary M/M/n branch with load
// psi; birth-death rates lambda and min(q, n) * mu, evaluated in log space.
double branch_overflow_prob(int n, double psi, std::int64_t q_max);

// Split of a shared memory pool between the two branch buffers and the
// synchronizer. loss_estimate adds the three overflow tails (an upper bound
// on the combined loss).
struct MemoryPlan {
    std::int64_t q_a_max = 0;
    std::int64_t q_b_max = 0;
    std::int64_t k_max = 0;
    std::int64_t total = 0;
    double loss_estimate = 0.0;
};

// Exhaustive search over all splits q_a_max + q_b_max + k_max == m_max for
// the smallest loss estimate; ties broken toward larger k_max, then larger
// q_a_max.
MemoryPlan partition_memory(const NetworkParams& p, double rho, std::int64_t m_max);

// Smallest total memory whose best split keeps the loss estimate below
// epsilon.
std::int64_t min_total_memory(const NetworkParams& p, double rho, double epsilon);

} // namespace forkjoin
