#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace tkt {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seeded generator with hand-rolled draws. std::mt19937_64's raw output
/// is pinned by the standard, while the std distributions are not, so
/// sampling is done here to keep generated corpora byte-identical across
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [lo, hi], inclusive.
    std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
        if (hi <= lo) return lo;
        const std::uint64_t span = hi - lo + 1;
        return lo + next() % span;
    }

    /// Uniform double in [0, 1).
    double unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Box-Muller normal draw.
    double normal(double mean, double stddev) {
        if (!has_spare_) {
            double u1 = unit();
            if (u1 <= 0) u1 = 0x1.0p-53;
            const double u2 = unit();
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * 3.141592653589793 * u2;
            spare_ = radius * std::sin(angle);
            has_spare_ = true;
            return mean + stddev * radius * std::cos(angle);
        }
        has_spare_ = false;
        return mean + stddev * spare_;
    }

    /// Fisher-Yates shuffle (std::shuffle is not reproducible across
    /// standard libraries).
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_u64(0, i - 1));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0;
};

} // namespace tkt
