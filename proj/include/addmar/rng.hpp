#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace addmar {

// One substream per generated artifact, so regenerating the low-rank truth, the
// sparse truth, or the noise never depends on how much the other streams consumed.
enum class RngStream : std::uint64_t {
    truth_lowrank = 1,
    truth_sparse = 2,
    noise = 3,
    generic = 4,
};

namespace detail {
// splitmix64 finalizer; spreads (seed, stream) into a well-mixed engine seed.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic random source. All variate transforms are spelled out here rather
// than delegated to std:: distributions so that a (seed, stream) pair reproduces the
// same values on any standard library.
class Rng {
public:
    Rng(std::uint64_t seed, RngStream stream)
        : gen_(detail::mix64(detail::mix64(seed) ^
                             (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(stream)))) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via Box-Muller; the spare of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log1p(-uniform01()));  // log(1-u) > -inf
        const double theta = 2.0 * M_PI * uniform01();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    bool coin() { return (gen_() & 1ULL) != 0; }

    // Uniform integer in [0, n); unbiased via rejection.
    std::size_t below(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        const std::uint64_t range = static_cast<std::uint64_t>(n);
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % range;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % range);
    }

    // Fisher-Yates shuffle (used for uniform subset selection).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace addmar
