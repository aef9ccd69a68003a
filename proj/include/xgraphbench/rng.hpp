#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace xgb {

// FNV-1a over a string, used to derive named RNG sub-streams from one master seed.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream. The engine is std::mt19937_64 (bit-exact across
// platforms); all distribution mappings are implemented here rather than with
// std:: distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1].
    double uniform_open0() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    // Uniform integer in [0, n). Unbiased via rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t x = engine_();
            if (x >= threshold) return x % n;
        }
    }

    int uniform_int(int n) { return static_cast<int>(uniform_index(static_cast<std::uint64_t>(n))); }

    // Standard normal via Box-Muller (one value per two uniform draws).
    double normal() {
        double u1 = uniform_open0();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Poisson sample. Knuth's product method for small lambda; larger lambdas
    // are split additively (Poisson(a)+Poisson(b) ~ Poisson(a+b)).
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        int total = 0;
        while (lambda > 30.0) {
            total += poisson_knuth(30.0);
            lambda -= 30.0;
        }
        return total + poisson_knuth(lambda);
    }

    // Index sampled proportionally to non-negative weights.
    int weighted_index(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) {
            // All-zero weights degenerate to uniform choice.
            return uniform_int(static_cast<int>(weights.size()));
        }
        double u = uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    // First k entries of a Fisher-Yates shuffle; `items` is permuted in place.
    template <typename T>
    void partial_shuffle(std::vector<T>& items, size_t k) {
        size_t n = items.size();
        if (k > n) k = n;
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + uniform_index(n - i);
            std::swap(items[i], items[j]);
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        partial_shuffle(items, items.size());
    }

private:
    int poisson_knuth(double lambda) {
        double limit = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    std::mt19937_64 engine_;
};

// Derives independent named sub-streams from one 64-bit master seed, so that
// consuming extra draws in one stage never perturbs another.
class SeedSplitter {
public:
    explicit SeedSplitter(std::uint64_t master) : master_(master) {}

    std::uint64_t derive(std::string_view name) const { return splitmix64(master_ ^ fnv1a64(name)); }

    std::uint64_t derive(std::string_view name, std::uint64_t index) const {
        return splitmix64(splitmix64(master_ ^ fnv1a64(name)) + index);
    }

    Rng stream(std::string_view name) const { return Rng(derive(name)); }
    Rng stream(std::string_view name, std::uint64_t index) const { return Rng(derive(name, index)); }

private:
    std::uint64_t master_;
};

}  // namespace xgb
