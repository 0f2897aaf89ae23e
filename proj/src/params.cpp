#include "forkjoin/params.hpp"

#include <cmath>
#include <string>

namespace forkjoin {

NetworkParams validate_params(const NetworkParams& p) {
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        fail("NonPositiveRate", "arrival rate lambda must be positive, got " +
                                    std::to_string(p.lambda));
    if (!(p.mu_a > 0.0) || !std::isfinite(p.mu_a))
        fail("NonPositiveRate", "service rate mu_a must be positive, got " +
                                    std::to_string(p.mu_a));
    if (!(p.mu_b > 0.0) || !std::isfinite(p.mu_b))
        fail("NonPositiveRate", "service rate mu_b must be positive, got " +
                                    std::to_string(p.mu_b));
    if (p.n_a < 1)
        fail("ZeroChannels", "branch a needs at least one channel, got " +
                                 std::to_string(p.n_a));
    if (p.n_b < 1)
        fail("ZeroChannels", "branch b needs at least one channel, got " +
                                 std::to_string(p.n_b));
    if (!(p.psi_a() < 1.0))
        fail("UnstableBranch",
             "branch a load psi_a = " + std::to_string(p.psi_a()) + " >= 1");
    if (!(p.psi_b() < 1.0))
        fail("UnstableBranch",
             "branch b load psi_b = " + std::to_string(p.psi_b()) + " >= 1");
    return p;
}

NetworkParams params_from_loads(double lambda, int n_a, double psi_a,
                                int n_b, double psi_b) {
    if (!(psi_a > 0.0) || !(psi_b > 0.0))
        fail("InvalidArgument", "loads must be positive");
    NetworkParams p;
    p.lambda = lambda;
    p.n_a = n_a;
    p.n_b = n_b;
    p.mu_a = lambda / (n_a * psi_a);
    p.mu_b = lambda / (n_b * psi_b);
    return validate_params(p);
}

} // namespace forkjoin
