#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "forkjoin/error.hpp"

namespace forkjoin {

// Seeded random stream identified by (master seed, label).
//
// The label is hashed with 64-bit FNV-1a, mixed into the master seed through
// one SplitMix64 round, and the result seeds a std::mt19937_64. Every step is
// fully specified, so a given (seed, label) pair produces the same sequence
// on any platform. Distinct labels give decorrelated substreams of one master
// seed; adding a new labelled stream never perturbs existing ones.
//
// Single-owner: a stream must not be shared between concurrent consumers.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view label)
        : engine_(substream_key(seed, label)) {}

    // Uniform on the open interval (0, 1), from the top 53 bits of the engine.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Exponential with the given rate via inversion, -ln(u)/rate.
    double exponential(double rate);

    static std::uint64_t substream_key(std::uint64_t seed, std::string_view label) {
        return splitmix64(splitmix64(seed) ^ fnv1a64(label));
    }

private:
    static std::uint64_t fnv1a64(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

// Free-function form of RngStream::exponential.
double sample_exponential(double rate, RngStream& s);

// Cumulative sums of `count` i.i.d. exponential(lambda) intervals; strictly
// increasing timestamps starting after zero.
std::vector<double> generate_arrival_times(double lambda, std::int64_t count,
                                           RngStream& s);

} // namespace forkjoin
