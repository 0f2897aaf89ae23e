#pragma once

#include <Eigen/Dense>

#include "forkjoin/error.hpp"

namespace forkjoin {

// Pearson criterion: 30 equiprobable bins, dof 29, critical value at the
// 0.01 significance level. Student criterion on the lag-1 interval
// correlation, one critical value for |r|.
inline constexpr int kChiSquareBins = 30;
inline constexpr int kChiSquareDof = kChiSquareBins - 1;
inline constexpr double kChiSquareCritical = 49.6;
inline constexpr double kStudentCritical = 2.33;
inline constexpr double kSignificance = 0.01;
inline constexpr Eigen::Index kMinIntervals = 100;

// Ordered inter-event intervals of one flow.
struct IntervalSample {
    Eigen::ArrayXd intervals;

    Eigen::Index n() const { return intervals.size(); }
};

IntervalSample make_interval_sample(Eigen::ArrayXd intervals);

struct ChiSquareReport {
    double statistic = 0.0;
    int bins = kChiSquareBins;
    int dof = kChiSquareDof;
    double threshold = kChiSquareCritical;
    bool rejected = false;
};

struct StudentReport {
    double r = 0.0;          // lag-1 sample correlation
    double statistic = 0.0;  // |r| * sqrt((n-3)/(1-r^2)), >= 0
    double threshold = kStudentCritical;
    bool rejected = false;
};

struct PoissonVerdict {
    ChiSquareReport chi;
    StudentReport student;
    bool almost_poisson = false;
    double alpha = kSignificance;
};

// Interior edges of `bins` equiprobable cells of the exponential(rate) law:
// e_j = -ln(1 - j/bins)/rate for j = 1..bins-1. The last cell extends to
// infinity.
Eigen::ArrayXd equiprobable_bin_edges(double rate, int bins);

// Pearson goodness-of-fit of the intervals against exponential(rate) with
// the rate known a priori, over 30 equiprobable bins. Requires n >= 100.
ChiSquareReport chi_square_exponential(const IntervalSample& s, double rate);

// Student criterion for zero lag-1 correlation of successive intervals.
// Requires n >= 100 and non-degenerate variance.
StudentReport lag1_student(const IntervalSample& s);

// A flow is almost Poisson with precision alpha when both hypotheses are
// accepted at level alpha: exponential intervals (Pearson) and zero lag-1
// interval correlation (Student).
PoissonVerdict classify_almost_poisson(const IntervalSample& s, double rate);

} // namespace forkjoin
