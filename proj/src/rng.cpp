#include "forkjoin/rng.hpp"

#include <cmath>
#include <string>

namespace forkjoin {

double RngStream::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        fail("NonPositiveRate",
             "exponential rate must be positive, got " + std::to_string(rate));
    return -std::log(uniform()) / rate;
}

double sample_exponential(double rate, RngStream& s) {
    return s.exponential(rate);
}

std::vector<double> generate_arrival_times(double lambda, std::int64_t count,
                                           RngStream& s) {
    if (count < 1)
        fail("InvalidArgument",
             "arrival count must be >= 1, got " + std::to_string(count));
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(count));
    double t = 0.0;
    for (std::int64_t i = 0; i < count; ++i) {
        t += s.exponential(lambda);
        times.push_back(t);
    }
    return times;
}

} // namespace forkjoin
