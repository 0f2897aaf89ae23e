#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forkjoin/ck.hpp"
#include "forkjoin/des.hpp"
#include "forkjoin/occupancy.hpp"
#include "forkjoin/stats.hpp"

namespace forkjoin {

enum class FlowKind { In, Out };
const char* flow_name(FlowKind f);

// One simulation cell of a parameter sweep. The seed is the exact value fed
// to run_simulation, so any row of a report can be reproduced standalone.
struct SweepCell {
    double lambda = 0.0;
    int n_a = 1, n_b = 1;
    double psi_a = 0.0, psi_b = 0.0;
    std::uint64_t seed = 0;

    NetworkParams params() const {
        return params_from_loads(lambda, n_a, psi_a, n_b, psi_b);
    }
    // Substream key of (base_seed, canonical cell text): decorrelates cells
    // that share one base seed.
    static std::uint64_t derive_seed(std::uint64_t base, double lambda, int n_a,
                                     int n_b, double psi_a, double psi_b);
};

struct RegionRow {
    SweepCell cell;
    FlowKind flow = FlowKind::In;
    double chi2 = 0.0;
    double st = 0.0;
    bool almost_poisson = false;
    std::string error;  // error kind when the cell failed; empty otherwise
};

struct RegionReport {
    std::vector<RegionRow> rows;

    // Fraction of error-free rows of one flow that came out almost Poisson.
    double accept_fraction(FlowKind f) const;
};

// Cartesian sweep over network parameters; every (cell, base seed) pair maps
// to one simulation with a derived per-cell seed.
struct SweepSpec {
    std::vector<double> lambdas;
    std::vector<int> n_a_values, n_b_values;
    std::vector<double> psi_a_values, psi_b_values;
    std::vector<std::uint64_t> seeds;
    std::int64_t jobs = 100000;
    double warmup_fraction = 0.1;
    bool flow_in = true;
    bool flow_out = true;
    int parallelism = 1;
};

// Expands the spec into cells in canonical order (lambda, n_a, n_b, psi_a,
// psi_b, seed). Throws if any cell fails validate_params.
std::vector<SweepCell> sweep_cells(const SweepSpec& spec);

// Simulates every cell and classifies the selected flows. Per-cell domain
// errors are recorded in the rows, not thrown. Row order is canonical
// whatever the parallelism degree.
RegionReport run_cells(const std::vector<SweepCell>& cells, std::int64_t jobs,
                       double warmup_fraction, bool flow_in, bool flow_out,
                       int parallelism);

RegionReport run_sweep(const SweepSpec& spec);

// --- almost-Poisson region maps -------------------------------------------
//
// Parameter boxes inside which a flow of the network stays almost Poisson.
// Unbounded channel rows are sampled at representative counts {6, 8}.

struct PsiInterval {
    double lo = 0.0, hi = 1.0;
    bool lo_open = true, hi_open = true;
};

struct RegionBox {
    std::string label;
    FlowKind flow = FlowKind::In;
    std::vector<int> n_a_values, n_b_values;
    std::vector<PsiInterval> psi_a, psi_b;  // union of intervals per axis
    double min_abs_psi_diff = 0.0;          // |psi_b - psi_a| >= this
};

std::vector<RegionBox> input_flow_regions();
std::vector<RegionBox> output_flow_regions();

// Per-block arrival rate used when sampling region boxes: 0.3 for 1-2
// channels, 1.5 for 3-5, 2.0 for 6 and up.
double lambda_for_channels(int n);

// Grid of cells covering a box: psi values on multiples of `step` inside the
// box intervals, one cell per (n_a, n_b, psi_a, psi_b) with a derived seed.
std::vector<SweepCell> box_cells(const RegionBox& box, double step,
                                 std::uint64_t base_seed);

// --- conditional-intensity curves ------------------------------------------

struct CurvePoint {
    double psi_a = 0.0, psi_b = 0.0;
    double delta = 0.0;  // (lambda - conditional intensity) / lambda
};

// Solves the single-channel stationary grid (lambda normalized to 1, mu set
// from the loads) for every (psi_a, psi_b) pair and records the relative
// intensity drop.
std::vector<CurvePoint> delta_curves(const std::vector<double>& psi_b_values,
                                     const std::vector<double>& psi_a_grid,
                                     const CkOptions& options, int parallelism);

// --- occupancy-law validation ----------------------------------------------

struct OccupancyFit {
    std::uint64_t seed = 0;
    double rho_hat = 0.0;         // lambda * mean sojourn
    double mean_occupancy = 0.0;  // time average over the run
    double chi2 = 0.0;
    double threshold = 0.0;
    int dof = 0;
    bool accepted = false;
    double little_rel_err = 0.0;  // |mean_occupancy - rho_hat| / rho_hat
};

struct OccupancyLawReport {
    std::vector<OccupancyFit> fits;
    int accepted_count() const;
};

// Checks the Poisson(lambda * T) occupancy law against simulation: occupancy
// seen by arriving first partners, subsampled past the correlation time, is
// tested chi-square against Poisson(rho_hat) on bins pooled to expected
// counts >= 5, at significance 0.01.
OccupancyLawReport validate_occupancy_law(const NetworkParams& p,
                                          std::int64_t jobs,
                                          const std::vector<std::uint64_t>& seeds,
                                          double warmup_fraction = 0.1);

} // namespace forkjoin
