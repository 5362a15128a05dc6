#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wperm {

// Reproducible random stream: identical (seed, stream) pairs produce identical
// sequences. Streams with distinct ids are seeded independently.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x9e3779b9u};
        engine_.seed(seq);
    }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform on (0, 1].
    double uniform_open0() { return 1.0 - uniform(); }

    // Poisson(mean) by sequential inversion for small means; larger means use
    // the standard library sampler.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) {
            double u = uniform();
            double p = std::exp(-mean);
            double cdf = p;
            std::uint64_t k = 0;
            while (u >= cdf) {
                ++k;
                p *= mean / static_cast<double>(k);
                cdf += p;
                if (p < 1e-300 && static_cast<double>(k) > mean) break;
            }
            return k;
        }
        std::poisson_distribution<std::uint64_t> dist(mean);
        return dist(engine_);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace wperm
