#include "forkjoin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace forkjoin {

IntervalSample make_interval_sample(Eigen::ArrayXd intervals) {
    if ((intervals < 0.0).any())
        fail("InvalidArgument", "intervals must be non-negative");
    return IntervalSample{std::move(intervals)};
}

Eigen::ArrayXd equiprobable_bin_edges(double rate, int bins) {
    if (!(rate > 0.0)) fail("NonPositiveRate", "bin edge rate must be positive");
    if (bins < 2) fail("InvalidArgument", "need at least 2 bins");
    Eigen::ArrayXd edges(bins - 1);
    for (int j = 1; j < bins; ++j)
        edges[j - 1] = -std::log(1.0 - static_cast<double>(j) / bins) / rate;
    return edges;
}

ChiSquareReport chi_square_exponential(const IntervalSample& s, double rate) {
    if (s.n() < kMinIntervals)
        fail("TooFewEvents", "chi-square test needs >= " +
                                 std::to_string(kMinIntervals) +
                                 " intervals, got " + std::to_string(s.n()));
    const Eigen::ArrayXd edges = equiprobable_bin_edges(rate, kChiSquareBins);

    std::vector<std::int64_t> counts(kChiSquareBins, 0);
    const double* first = edges.data();
    const double* last = edges.data() + edges.size();
    for (Eigen::Index i = 0; i < s.n(); ++i) {
        // Cell j spans [e_{j-1}, e_j); values on an edge go to the upper cell.
        auto it = std::upper_bound(first, last, s.intervals[i]);
        ++counts[static_cast<std::size_t>(it - first)];
    }

    const double expected = static_cast<double>(s.n()) / kChiSquareBins;
    double statistic = 0.0;
    for (std::int64_t o : counts) {
        const double d = static_cast<double>(o) - expected;
        statistic += d * d / expected;
    }

    ChiSquareReport rep;
    rep.statistic = statistic;
    rep.rejected = statistic > rep.threshold;
    return rep;
}

StudentReport lag1_student(const IntervalSample& s) {
    const Eigen::Index n = s.n();
    if (n < kMinIntervals)
        fail("TooFewEvents", "Student test needs >= " +
                                 std::to_string(kMinIntervals) +
                                 " intervals, got " + std::to_string(n));
    const Eigen::Index m = n - 1;  // number of (x_i, x_{i+1}) pairs
    Eigen::ArrayXd x = s.intervals.head(m);
    Eigen::ArrayXd y = s.intervals.tail(m);
    const double mx = x.mean();
    const double my = y.mean();
    const double sxx = ((x - mx) * (x - mx)).sum();
    const double syy = ((y - my) * (y - my)).sum();
    if (sxx <= 0.0 || syy <= 0.0)
        fail("ZeroVariance", "lag-1 correlation undefined for a constant sample");
    const double sxy = ((x - mx) * (y - my)).sum();
    const double r = sxy / std::sqrt(sxx * syy);

    StudentReport rep;
    rep.r = r;
    const double one_minus_r2 = 1.0 - r * r;
    if (one_minus_r2 <= std::numeric_limits<double>::epsilon())
        rep.statistic = std::numeric_limits<double>::infinity();
    else
        rep.statistic = std::abs(r) * std::sqrt((n - 3) / one_minus_r2);
    rep.rejected = rep.statistic > rep.threshold;
    return rep;
}

PoissonVerdict classify_almost_poisson(const IntervalSample& s, double rate) {
    PoissonVerdict v;
    v.chi = chi_square_exponential(s, rate);
    v.student = lag1_student(s);
    v.almost_poisson = !v.chi.rejected && !v.student.rejected;
    return v;
}

} // namespace forkjoin
