#include "forkjoin/ck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace forkjoin {

namespace {

void require_single_channel(const NetworkParams& p) {
    validate_params(p);
    if (p.n_a != 1 || p.n_b != 1)
        fail("InvalidArgument",
             "the stationary grid is defined for single-channel branches");
}

// Truncated-generator stencil. Outgoing rates drop transitions that would
// leave the grid (joint arrivals on the rim), which keeps the uniformized
// sweep stochastic.
struct Stencil {
    double lambda, mu_a, mu_b;
    int q;                    // grid bound
    Eigen::MatrixXd outrate;  // total outgoing rate per state

    Stencil(const NetworkParams& p, int q_max)
        : lambda(p.lambda), mu_a(p.mu_a), mu_b(p.mu_b), q(q_max),
          outrate(q_max + 1, q_max + 1) {
        for (int qa = 0; qa <= q; ++qa)
            for (int qb = 0; qb <= q; ++qb)
                outrate(qa, qb) = (qa < q && qb < q ? lambda : 0.0) +
                                  (qa > 0 ? mu_a : 0.0) + (qb > 0 ? mu_b : 0.0);
    }

    // dst(s) = sum of rate * P(source) over transitions into s.
    void inflow_into(const Eigen::MatrixXd& prob, Eigen::MatrixXd& dst) const {
        dst.setZero();
        dst.block(1, 1, q, q) = lambda * prob.block(0, 0, q, q);
        dst.block(0, 0, q, q + 1) += mu_a * prob.block(1, 0, q, q + 1);
        dst.block(0, 0, q + 1, q) += mu_b * prob.block(0, 1, q + 1, q);
    }
};

double rim_mass(const Eigen::MatrixXd& prob) {
    const Eigen::Index q = prob.rows() - 1;
    return prob.row(q).sum() + prob.col(q).sum() - prob(q, q);
}

// Product of truncated geometric marginals: the exact marginals of the
// untruncated chain, so the sweep starts close to the solution.
Eigen::MatrixXd geometric_product_start(const NetworkParams& p, int q_max) {
    Eigen::VectorXd wa(q_max + 1), wb(q_max + 1);
    for (int i = 0; i <= q_max; ++i) {
        wa[i] = std::pow(p.psi_a(), i);
        wb[i] = std::pow(p.psi_b(), i);
    }
    Eigen::MatrixXd start = wa * wb.transpose();
    start /= start.sum();
    return start;
}

} // namespace

StationaryGrid solve_stationary(const NetworkParams& p, const CkOptions& opt) {
    require_single_channel(p);
    if (opt.q_max < 10) fail("InvalidArgument", "q_max must be >= 10");
    if (!(opt.tol > 0.0)) fail("InvalidArgument", "tolerance must be positive");

    const Stencil st(p, opt.q_max);
    const double uniformization = p.lambda + p.mu_a + p.mu_b;
    // Sweep change is residual / uniformization, so this bound makes both the
    // per-sweep change and the final residual land under opt.tol.
    const double change_tol = opt.tol / std::max(1.0, uniformization);

    Eigen::MatrixXd cur = geometric_product_start(p, opt.q_max);
    Eigen::MatrixXd nxt(opt.q_max + 1, opt.q_max + 1);
    Eigen::MatrixXd inflow(opt.q_max + 1, opt.q_max + 1);

    long iter = 0;
    bool converged = false;
    while (iter < opt.max_iter) {
        ++iter;
        st.inflow_into(cur, inflow);
        nxt.array() = cur.array() +
                      (inflow.array() - st.outrate.array() * cur.array()) /
                          uniformization;
        const double change = (nxt - cur).cwiseAbs().maxCoeff();
        nxt /= nxt.sum();
        cur.swap(nxt);
        if (change <= change_tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        fail("NoConvergence", "stationary sweep did not converge in " +
                                  std::to_string(opt.max_iter) + " iterations");

    StationaryGrid grid;
    grid.q_max = opt.q_max;
    grid.probs = std::move(cur);
    grid.iterations = iter;
    grid.residual = balance_residual(grid.probs, p);
    grid.mass_at_boundary = rim_mass(grid.probs);
    if (grid.mass_at_boundary > opt.boundary_budget)
        fail("TruncationTooSmall",
             "rim mass " + std::to_string(grid.mass_at_boundary) +
                 " exceeds the truncation budget at q_max = " +
                 std::to_string(opt.q_max));
    return grid;
}

StationaryGrid solve_stationary_auto(const NetworkParams& p, CkOptions opt) {
    require_single_channel(p);
    auto predicted_rim = [&](int q) {
        return (1.0 - p.psi_a()) * std::pow(p.psi_a(), q) +
               (1.0 - p.psi_b()) * std::pow(p.psi_b(), q);
    };
    const int kHardCap = 1 << 14;
    while (opt.q_max < kHardCap &&
           predicted_rim(opt.q_max) > 0.5 * opt.boundary_budget)
        opt.q_max *= 2;
    for (;;) {
        try {
            return solve_stationary(p, opt);
        } catch (const Error& e) {
            if (e.kind() != "TruncationTooSmall" || opt.q_max >= kHardCap) throw;
            opt.q_max *= 2;
        }
    }
}

double balance_residual(const Eigen::MatrixXd& probs, const NetworkParams& p) {
    if (probs.rows() != probs.cols() || probs.rows() < 2)
        fail("InvalidArgument", "grid must be square and non-trivial");
    const Stencil st(p, static_cast<int>(probs.rows()) - 1);
    Eigen::MatrixXd inflow(probs.rows(), probs.cols());
    st.inflow_into(probs, inflow);
    return (inflow - st.outrate.cwiseProduct(probs)).cwiseAbs().maxCoeff();
}

double region_probability(const StationaryGrid& g,
                          const std::function<bool(int, int)>& region) {
    double acc = 0.0;
    for (int qa = 0; qa <= g.q_max; ++qa)
        for (int qb = 0; qb <= g.q_max; ++qb)
            if (region(qa, qb)) acc += g.probs(qa, qb);
    return acc;
}

double conditional_rate(const StationaryGrid& g, const NetworkParams& p) {
    const double mu_a = p.mu_a, mu_b = p.mu_b;
    // Strict-inequality regions of the conditional-intensity ratio.
    const double b_over_a_1 = region_probability(
        g, [](int qa, int qb) { return qb > qa && qa > 1; });
    const double a_over_b_1 = region_probability(
        g, [](int qa, int qb) { return qa > qb && qb > 1; });
    const double equal_1 = region_probability(
        g, [](int qa, int qb) { return qa == qb && qa > 1; });
    const double b_over_a_0 = region_probability(
        g, [](int qa, int qb) { return qb > qa && qa > 0; });
    const double a_over_b_0 = region_probability(
        g, [](int qa, int qb) { return qa > qb && qb > 0; });
    const double equal_0 = region_probability(
        g, [](int qa, int qb) { return qa == qb && qa > 0; });

    const double numerator = mu_a * mu_a * b_over_a_1 + mu_b * mu_b * a_over_b_1 +
                             (mu_a * mu_a + mu_b * mu_b) * equal_1;
    const double denominator = mu_a * b_over_a_0 + mu_b * a_over_b_0 +
                               (mu_a + mu_b) * equal_0;
    if (!(denominator > 0.0))
        fail("DegenerateDenominator",
             "no probability mass in the conditioning regions");
    return numerator / denominator;
}

double delta_p_relative(const StationaryGrid& g, const NetworkParams& p) {
    return (p.lambda - conditional_rate(g, p)) / p.lambda;
}

Eigen::VectorXd marginal_distribution(const StationaryGrid& g, char branch) {
    if (branch == 'a') return g.probs.rowwise().sum();
    if (branch == 'b') return g.probs.colwise().sum().transpose();
    fail("InvalidArgument", "branch must be 'a' or 'b'");
}

} // namespace forkjoin
