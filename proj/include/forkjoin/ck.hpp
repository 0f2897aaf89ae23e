#pragma once

#include <functional>

#include <Eigen/Dense>

#include "forkjoin/params.hpp"

namespace forkjoin {

// Stationary joint queue-length distribution of the {M/M/1; M/M/1} fork-join
// network on a truncated grid. State (q_a, q_b) holds the number of jobs in
// each branch; arrivals move (q_a, q_b) -> (q_a+1, q_b+1) at rate lambda,
// services move one coordinate down at mu_a / mu_b. Truncation is
// reflecting: transitions that would leave the grid are dropped.
struct StationaryGrid {
    int q_max = 0;
    Eigen::MatrixXd probs;          // (q_max+1) x (q_max+1); probs(q_a, q_b)
    double residual = 0.0;          // max |inflow - outflow| over all states
    double mass_at_boundary = 0.0;  // probability on the rim q = q_max
    long iterations = 0;
};

struct CkOptions {
    int q_max = 200;
    double tol = 1e-12;         // residual target, also bounds the sweep change
    long max_iter = 4000000;
    double boundary_budget = 1e-8;  // reject grids holding more rim mass
};

// Fixed-point sweep of the uniformized chain (uniformization constant
// lambda + mu_a + mu_b) with renormalization each pass; stops once the
// balance residual falls below opt.tol. Requires n_a == n_b == 1 and both
// loads < 1. Error kinds: NoConvergence, TruncationTooSmall.
StationaryGrid solve_stationary(const NetworkParams& p, const CkOptions& opt = {});

// Same, but grows q_max in powers of two until the predicted rim mass fits
// the budget before solving.
StationaryGrid solve_stationary_auto(const NetworkParams& p, CkOptions opt = {});

// Max absolute violation of the stationary balance equations of the
// truncated chain, evaluated directly on the grid.
double balance_residual(const Eigen::MatrixXd& probs, const NetworkParams& p);

// Total probability of the states satisfying a predicate over (q_a, q_b).
double region_probability(const StationaryGrid& g,
                          const std::function<bool(int, int)>& region);

// Conditional intensity of the first-partner flow immediately after a
// first-partner event:
//
//   mu_a^2 P(q_b>q_a>1) + mu_b^2 P(q_a>q_b>1) + (mu_a^2+mu_b^2) P(q_a=q_b>1)
//   -----------------------------------------------------------------------
//   mu_a  P(q_b>q_a>0) + mu_b  P(q_a>q_b>0) + (mu_a+mu_b)    P(q_a=q_b>0)
//
// For a Poisson flow this would equal lambda; the fork-join input flow gives
// strictly less. Error kind: DegenerateDenominator.
double conditional_rate(const StationaryGrid& g, const NetworkParams& p);

// Relative drop of the conditional intensity, (lambda - conditional)/lambda.
double delta_p_relative(const StationaryGrid& g, const NetworkParams& p);

// Row ('a') or column ('b') sums: the marginal queue-length pmf of a branch.
Eigen::VectorXd marginal_distribution(const StationaryGrid& g, char branch);

} // namespace forkjoin
