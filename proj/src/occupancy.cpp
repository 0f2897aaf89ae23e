#include "forkjoin/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace forkjoin {

namespace {

double poisson_log_pmf(double rho, std::int64_t k) {
    return static_cast<double>(k) * std::log(rho) - rho -
           std::lgamma(static_cast<double>(k) + 1.0);
}

double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

} // namespace

double occupancy_pmf(const OccupancyModel& m, std::int64_t k) {
    if (k < 0) fail("InvalidArgument", "occupancy cannot be negative");
    if (!(m.rho >= 0.0)) fail("InvalidArgument", "rho must be >= 0");
    if (m.rho == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(poisson_log_pmf(m.rho, k));
}

double occupancy_tail(const OccupancyModel& m, std::int64_t k_max) {
    if (k_max < 0) fail("InvalidArgument", "k_max must be >= 0");
    if (m.rho == 0.0) return 0.0;
    // Sum pmf terms upward from k_max + 1; all positive, no cancellation.
    double tail = 0.0;
    double term = std::exp(poisson_log_pmf(m.rho, k_max + 1));
    std::int64_t k = k_max + 1;
    while (term > 0.0) {
        tail += term;
        ++k;
        term *= m.rho / static_cast<double>(k);
        if (k > k_max + 1 && static_cast<double>(k) > m.rho &&
            term < tail * 1e-18)
            break;
    }
    return std::min(tail, 1.0);
}

std::int64_t required_memory(double rho, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        fail("InvalidArgument",
             "loss budget must be in (0, 1), got " + std::to_string(epsilon));
    if (!(rho >= 0.0)) fail("InvalidArgument", "rho must be >= 0");
    const OccupancyModel m{rho};
    std::int64_t k = 0;
    while (!(occupancy_tail(m, k) < epsilon)) ++k;
    return k;
}

double branch_overflow_prob(int n, double psi, std::int64_t q_max) {
    if (n < 1) fail("ZeroChannels", "channel count must be >= 1");
    if (!(psi > 0.0 && psi < 1.0))
        fail("UnstableBranch",
             "branch load must be in (0, 1), got " + std::to_string(psi));
    if (q_max < 0) fail("InvalidArgument", "q_max must be >= 0");

    // Unnormalized log weights: lw(q) = q ln(n psi) - ln q!  for q <= n,
    // then geometric decay by psi per extra job.
    const double log_a = std::log(static_cast<double>(n) * psi);
    const double log_psi = std::log(psi);
    auto log_weight = [&](std::int64_t q) {
        if (q <= n)
            return static_cast<double>(q) * log_a -
                   std::lgamma(static_cast<double>(q) + 1.0);
        return static_cast<double>(n) * log_a -
               std::lgamma(static_cast<double>(n) + 1.0) +
               static_cast<double>(q - n) * log_psi;
    };
    // Tail of the geometric part from state q (inclusive): w(q)/(1 - psi).
    auto log_geo_from = [&](std::int64_t q) {
        return log_weight(q) - std::log1p(-psi);
    };

    const double neg_inf = -std::numeric_limits<double>::infinity();
    double log_head = neg_inf;  // states 0..q_max
    for (std::int64_t q = 0; q <= q_max; ++q)
        log_head = log_add(log_head, log_weight(q));

    double log_tail;  // states q_max+1 .. infinity
    if (q_max >= n) {
        log_tail = log_geo_from(q_max + 1);
    } else {
        double log_mid = neg_inf;  // states q_max+1 .. n
        for (std::int64_t q = q_max + 1; q <= n; ++q)
            log_mid = log_add(log_mid, log_weight(q));
        log_tail = log_add(log_mid, log_geo_from(n + 1));
    }
    const double log_total = log_add(log_head, log_tail);
    return std::exp(log_tail - log_total);
}

MemoryPlan partition_memory(const NetworkParams& p, double rho,
                            std::int64_t m_max) {
    validate_params(p);
    if (m_max < 0) fail("InvalidArgument", "total memory must be >= 0");
    const OccupancyModel model{rho};

    std::vector<double> loss_a(static_cast<std::size_t>(m_max) + 1);
    std::vector<double> loss_b(static_cast<std::size_t>(m_max) + 1);
    std::vector<double> loss_k(static_cast<std::size_t>(m_max) + 1);
    for (std::int64_t i = 0; i <= m_max; ++i) {
        loss_a[static_cast<std::size_t>(i)] = branch_overflow_prob(p.n_a, p.psi_a(), i);
        loss_b[static_cast<std::size_t>(i)] = branch_overflow_prob(p.n_b, p.psi_b(), i);
        loss_k[static_cast<std::size_t>(i)] = occupancy_tail(model, i);
    }

    MemoryPlan best;
    bool have_best = false;
    for (std::int64_t i = 0; i <= m_max; ++i) {
        for (std::int64_t j = 0; j + i <= m_max; ++j) {
            const std::int64_t k = m_max - i - j;
            const double loss = loss_a[static_cast<std::size_t>(i)] +
                                loss_b[static_cast<std::size_t>(j)] +
                                loss_k[static_cast<std::size_t>(k)];
            const bool better =
                !have_best || loss < best.loss_estimate ||
                (loss == best.loss_estimate &&
                 (k > best.k_max || (k == best.k_max && i > best.q_a_max)));
            if (better) {
                best = MemoryPlan{i, j, k, m_max, loss};
                have_best = true;
            }
        }
    }
    return best;
}

std::int64_t min_total_memory(const NetworkParams& p, double rho,
                              double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        fail("InvalidArgument", "loss budget must be in (0, 1)");
    const std::int64_t kCap = 100000;
    for (std::int64_t m = 0; m <= kCap; ++m)
        if (partition_memory(p, rho, m).loss_estimate < epsilon) return m;
    fail("NoConvergence", "no total memory under the cap meets the budget");
}

} // namespace forkjoin
