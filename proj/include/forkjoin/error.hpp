#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace forkjoin {

// Domain error carrying a stable machine-readable kind alongside the message.
// Kinds in use: NonPositiveRate, ZeroChannels, UnstableBranch, TooFewEvents,
// ZeroVariance, EmptyObservation, NoConvergence, TruncationTooSmall,
// DegenerateDenominator, InvalidArgument, Io.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

[[noreturn]] inline void fail(std::string kind, const std::string& what) {
    throw Error(std::move(kind), what);
}

} // namespace forkjoin
