#include "forkjoin/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "forkjoin/rng.hpp"
#include "forkjoin/special.hpp"

namespace forkjoin {

namespace {

// Runs body(i) for i in [0, count) on `threads` workers. The first exception
// wins and is rethrown on the caller thread.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t spawn =
        std::min(static_cast<std::size_t>(threads), count);
    pool.reserve(spawn);
    for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string cell_text(double lambda, int n_a, int n_b, double psi_a,
                      double psi_b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "cell:%.17g:%d:%d:%.17g:%.17g", lambda, n_a,
                  n_b, psi_a, psi_b);
    return buf;
}

} // namespace

const char* flow_name(FlowKind f) { return f == FlowKind::In ? "in" : "out"; }

std::uint64_t SweepCell::derive_seed(std::uint64_t base, double lambda, int n_a,
                                     int n_b, double psi_a, double psi_b) {
    return RngStream::substream_key(base,
                                    cell_text(lambda, n_a, n_b, psi_a, psi_b));
}

double RegionReport::accept_fraction(FlowKind f) const {
    std::int64_t total = 0, accepted = 0;
    for (const RegionRow& row : rows) {
        if (row.flow != f || !row.error.empty()) continue;
        ++total;
        if (row.almost_poisson) ++accepted;
    }
    return total == 0 ? 0.0 : static_cast<double>(accepted) / total;
}

std::vector<SweepCell> sweep_cells(const SweepSpec& spec) {
    std::vector<SweepCell> cells;
    for (double lambda : spec.lambdas)
        for (int n_a : spec.n_a_values)
            for (int n_b : spec.n_b_values)
                for (double psi_a : spec.psi_a_values)
                    for (double psi_b : spec.psi_b_values)
                        for (std::uint64_t base : spec.seeds) {
                            SweepCell c{lambda, n_a, n_b, psi_a, psi_b, 0};
                            c.params();  // throws on an invalid cell
                            c.seed = SweepCell::derive_seed(base, lambda, n_a,
                                                            n_b, psi_a, psi_b);
                            cells.push_back(c);
                        }
    return cells;
}

RegionReport run_cells(const std::vector<SweepCell>& cells, std::int64_t jobs,
                       double warmup_fraction, bool flow_in, bool flow_out,
                       int parallelism) {
    struct CellResult {
        double chi2_in = 0, st_in = 0, chi2_out = 0, st_out = 0;
        bool ok_in = false, ok_out = false;
        std::string error;
    };
    std::vector<CellResult> results(cells.size());

    parallel_for(cells.size(), parallelism, [&](std::size_t i) {
        const SweepCell& cell = cells[i];
        CellResult& r = results[i];
        try {
            const SimOutput sim =
                run_simulation(cell.params(), jobs, cell.seed, warmup_fraction);
            if (flow_in) {
                const PoissonVerdict v = classify_almost_poisson(
                    extract_intervals(sim.in_trace), cell.lambda);
                r.chi2_in = v.chi.statistic;
                r.st_in = v.student.statistic;
                r.ok_in = v.almost_poisson;
            }
            if (flow_out) {
                const PoissonVerdict v = classify_almost_poisson(
                    extract_intervals(sim.out_trace), cell.lambda);
                r.chi2_out = v.chi.statistic;
                r.st_out = v.student.statistic;
                r.ok_out = v.almost_poisson;
            }
        } catch (const Error& e) {
            r.error = e.kind();
        }
    });

    RegionReport report;
    report.rows.reserve(cells.size() * ((flow_in ? 1u : 0u) + (flow_out ? 1u : 0u)));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const CellResult& r = results[i];
        if (flow_in)
            report.rows.push_back(RegionRow{cells[i], FlowKind::In, r.chi2_in,
                                            r.st_in, r.ok_in, r.error});
        if (flow_out)
            report.rows.push_back(RegionRow{cells[i], FlowKind::Out, r.chi2_out,
                                            r.st_out, r.ok_out, r.error});
    }
    return report;
}

RegionReport run_sweep(const SweepSpec& spec) {
    return run_cells(sweep_cells(spec), spec.jobs, spec.warmup_fraction,
                     spec.flow_in, spec.flow_out, spec.parallelism);
}

// --- region maps ------------------------------------------------------------

namespace {

constexpr PsiInterval kLowBand{0.0, 0.2, true, false};    // (0, 0.2]
constexpr PsiInterval kHighBand{0.75, 1.0, false, true};  // [0.75, 1)
constexpr PsiInterval kOpenUnit{0.0, 1.0, true, true};    // (0, 1)
constexpr PsiInterval kToThreeQuarters{0.0, 0.75, true, false};  // (0, 0.75]

const std::vector<int> kFewChannels{1, 2};
const std::vector<int> kMidChannels{3, 4, 5};
const std::vector<int> kManyChannels{6, 8};

std::vector<RegionBox> flow_regions(FlowKind flow) {
    // The first two boxes of the output map additionally require the loads to
    // differ by at least 0.1 on the low-band side.
    const double gap = flow == FlowKind::Out ? 0.1 : 0.0;
    std::vector<RegionBox> boxes;
    boxes.push_back(RegionBox{"few-channels, psi_a low or high, psi_b low",
                              flow,
                              kFewChannels,
                              kFewChannels,
                              {kLowBand, kHighBand},
                              {kLowBand},
                              gap});
    boxes.push_back(RegionBox{"few-channels, psi_a low, psi_b low or high",
                              flow,
                              kFewChannels,
                              kFewChannels,
                              {kLowBand},
                              {kLowBand, kHighBand},
                              gap});
    boxes.push_back(RegionBox{"mid-channels, psi_a <= 0.75",
                              flow,
                              kMidChannels,
                              kMidChannels,
                              {kToThreeQuarters},
                              {kOpenUnit},
                              0.0});
    boxes.push_back(RegionBox{"mid-channels, psi_b <= 0.75",
                              flow,
                              kMidChannels,
                              kMidChannels,
                              {kOpenUnit},
                              {kToThreeQuarters},
                              0.0});
    boxes.push_back(RegionBox{"many-channels, any loads",
                              flow,
                              kManyChannels,
                              kManyChannels,
                              {kOpenUnit},
                              {kOpenUnit},
                              0.0});
    return boxes;
}

std::vector<double> interval_grid(const std::vector<PsiInterval>& intervals,
                                  double step) {
    std::vector<double> values;
    const double eps = step * 1e-9;
    for (int k = 1; k * step < 1.0 - eps; ++k) {
        const double v = k * step;
        bool inside = false;
        for (const PsiInterval& iv : intervals) {
            if (v < iv.lo - eps || v > iv.hi + eps) continue;
            if (iv.lo_open && std::abs(v - iv.lo) < eps) continue;
            if (iv.hi_open && std::abs(v - iv.hi) < eps) continue;
            inside = true;
            break;
        }
        if (inside && (values.empty() || v > values.back() + eps))
            values.push_back(v);
    }
    return values;
}

} // namespace

std::vector<RegionBox> input_flow_regions() { return flow_regions(FlowKind::In); }
std::vector<RegionBox> output_flow_regions() { return flow_regions(FlowKind::Out); }

double lambda_for_channels(int n) {
    if (n <= 2) return 0.3;
    if (n <= 5) return 1.5;
    return 2.0;
}

std::vector<SweepCell> box_cells(const RegionBox& box, double step,
                                 std::uint64_t base_seed) {
    const std::vector<double> psi_a_grid = interval_grid(box.psi_a, step);
    const std::vector<double> psi_b_grid = interval_grid(box.psi_b, step);
    std::vector<SweepCell> cells;
    for (int n_a : box.n_a_values)
        for (int n_b : box.n_b_values)
            for (double psi_a : psi_a_grid)
                for (double psi_b : psi_b_grid) {
                    if (std::abs(psi_b - psi_a) <
                        box.min_abs_psi_diff - step * 1e-9)
                        continue;
                    const double lambda =
                        lambda_for_channels(std::max(n_a, n_b));
                    SweepCell c{lambda, n_a, n_b, psi_a, psi_b, 0};
                    c.seed = SweepCell::derive_seed(base_seed, lambda, n_a, n_b,
                                                    psi_a, psi_b);
                    cells.push_back(c);
                }
    return cells;
}

// --- conditional-intensity curves ------------------------------------------

std::vector<CurvePoint> delta_curves(const std::vector<double>& psi_b_values,
                                     const std::vector<double>& psi_a_grid,
                                     const CkOptions& options, int parallelism) {
    std::vector<CurvePoint> points;
    for (double psi_b : psi_b_values)
        for (double psi_a : psi_a_grid)
            points.push_back(CurvePoint{psi_a, psi_b, 0.0});

    parallel_for(points.size(), parallelism, [&](std::size_t i) {
        CurvePoint& pt = points[i];
        const NetworkParams p = params_from_loads(1.0, 1, pt.psi_a, 1, pt.psi_b);
        const StationaryGrid grid = solve_stationary_auto(p, options);
        pt.delta = delta_p_relative(grid, p);
    });
    return points;
}

// --- occupancy-law validation ----------------------------------------------

int OccupancyLawReport::accepted_count() const {
    int n = 0;
    for (const OccupancyFit& f : fits) n += f.accepted ? 1 : 0;
    return n;
}

namespace {

// Occupancy seen by each arriving first partner (state just before the
// arrival), reconstructed from the two flow traces.
std::vector<int> occupancy_before_arrivals(const SimOutput& sim) {
    std::vector<int> seen;
    seen.reserve(sim.in_trace.size());
    std::size_t outs = 0;
    for (std::size_t i = 0; i < sim.in_trace.size(); ++i) {
        const double t = sim.in_trace[i];
        while (outs < sim.out_trace.size() && sim.out_trace[outs] < t) ++outs;
        seen.push_back(static_cast<int>(i - outs));
    }
    return seen;
}

} // namespace

OccupancyLawReport validate_occupancy_law(const NetworkParams& p,
                                          std::int64_t jobs,
                                          const std::vector<std::uint64_t>& seeds,
                                          double warmup_fraction) {
    validate_params(p);
    OccupancyLawReport report;
    for (std::uint64_t seed : seeds) {
        const SimOutput sim = run_simulation(p, jobs, seed, warmup_fraction);
        OccupancyFit fit;
        fit.seed = seed;
        fit.rho_hat = p.lambda * mean_sojourn(sim);
        fit.mean_occupancy = sim.mean_occupancy();
        fit.little_rel_err = fit.rho_hat > 0.0
                                 ? std::abs(fit.mean_occupancy - fit.rho_hat) /
                                       fit.rho_hat
                                 : 0.0;

        // Subsample past the occupancy correlation time (about rho arrivals).
        const std::vector<int> seen = occupancy_before_arrivals(sim);
        const std::size_t stride =
            std::max<std::size_t>(1, static_cast<std::size_t>(
                                         std::ceil(4.0 * fit.rho_hat)));
        std::vector<int> sampled;
        for (std::size_t i = 0; i < seen.size(); i += stride)
            sampled.push_back(seen[i]);
        const double n = static_cast<double>(sampled.size());

        int k_top = 0;
        for (int k : sampled) k_top = std::max(k_top, k);
        std::vector<double> observed(static_cast<std::size_t>(k_top) + 1, 0.0);
        for (int k : sampled) observed[static_cast<std::size_t>(k)] += 1.0;

        // Pool consecutive occupancy values until every group expects >= 5.
        const OccupancyModel model{fit.rho_hat};
        std::vector<double> obs_group, exp_group;
        double o_acc = 0.0, e_acc = 0.0, cum = 0.0;
        for (int k = 0; k <= k_top; ++k) {
            const double pk = occupancy_pmf(model, k);
            o_acc += observed[static_cast<std::size_t>(k)];
            e_acc += n * pk;
            cum += pk;
            if (e_acc >= 5.0) {
                obs_group.push_back(o_acc);
                exp_group.push_back(e_acc);
                o_acc = e_acc = 0.0;
            }
        }
        // Remaining mass beyond the last group goes into one tail bin.
        e_acc += n * (1.0 - cum);
        if (!obs_group.empty()) {
            obs_group.back() += o_acc;
            exp_group.back() += e_acc;
        }

        if (obs_group.size() < 3) {
            fit.chi2 = std::numeric_limits<double>::infinity();
            fit.dof = 1;
            fit.threshold = chi_square_quantile(0.99, fit.dof);
            fit.accepted = false;
            report.fits.push_back(fit);
            continue;
        }

        double chi2 = 0.0;
        for (std::size_t g = 0; g < obs_group.size(); ++g) {
            const double d = obs_group[g] - exp_group[g];
            chi2 += d * d / exp_group[g];
        }
        fit.chi2 = chi2;
        fit.dof = static_cast<int>(obs_group.size()) - 2;
        fit.threshold = chi_square_quantile(0.99, fit.dof);
        fit.accepted = chi2 <= fit.threshold;
        report.fits.push_back(fit);
    }
    return report;
}

} // namespace forkjoin
