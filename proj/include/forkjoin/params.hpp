#pragma once

#include "forkjoin/error.hpp"

namespace forkjoin {

// Two-branch fork-join network: Poisson arrivals of rate lambda are forked
// into branch a (M/M/n_a, per-channel rate mu_a) and branch b (M/M/n_b,
// per-channel rate mu_b); completed copies rejoin at the synchronizer.
struct NetworkParams {
    double lambda = 0.0;
    int n_a = 1;
    int n_b = 1;
    double mu_a = 0.0;
    double mu_b = 0.0;

    // Per-branch load. Stationarity requires both in (0, 1).
    double psi_a() const { return lambda / (n_a * mu_a); }
    double psi_b() const { return lambda / (n_b * mu_b); }
};

// Checks rates, channel counts and the stationarity condition psi < 1 for
// both branches; returns the params on success.
// Error kinds: NonPositiveRate, ZeroChannels, UnstableBranch.
NetworkParams validate_params(const NetworkParams& p);

// Convenience constructor from loads: mu = lambda / (n * psi).
NetworkParams params_from_loads(double lambda, int n_a, double psi_a,
                                int n_b, double psi_b);

} // namespace forkjoin
