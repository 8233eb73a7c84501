#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dce {

// Deterministic PRNG (splitmix64 core). Self-contained so streams are
// bit-reproducible across platforms and standard library versions.
// Independent streams are derived from (seed, stream id), which lets the
// data generator hand every customer its own stream regardless of
// generation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng for_stream(std::uint64_t seed, std::uint64_t stream_id) {
        Rng mixer(seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
        mixer.next_u64();
        return Rng(mixer.next_u64());
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller (cached second draw).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    // Poisson by inversion for small means, normal approximation above.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 60.0) {
            const double x = normal(mean, std::sqrt(mean));
            return x < 0.5 ? 0 : static_cast<std::uint64_t>(x + 0.5);
        }
        const double limit = std::exp(-mean);
        double prod = uniform();
        std::uint64_t n = 0;
        while (prod > limit) {
            prod *= uniform();
            ++n;
        }
        return n;
    }

    // Negative binomial with integer r: sum of r geometric draws.
    std::uint64_t negative_binomial(std::uint64_t r, double p) {
        std::uint64_t total = 0;
        for (std::uint64_t k = 0; k < r; ++k) {
            double u = uniform();
            if (u < 1e-300) u = 1e-300;
            total += static_cast<std::uint64_t>(std::floor(std::log(u) / std::log(1.0 - p)));
        }
        return total;
    }

    // Deterministic Fisher-Yates (std::shuffle is implementation-defined).
    template <typename T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(xs[i - 1], xs[j]);
        }
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace dce
