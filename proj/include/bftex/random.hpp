#ifndef BFTEX_RANDOM_HPP_
#define BFTEX_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bftex {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based generator: output n of stream key is a pure function of
/// (seed, key..., n), so work units can derive independent, schedule-free
/// streams. Bit-identical on every platform for the integer outputs.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(splitmix64(seed)) {}

    /// Child stream keyed by `id` (repeat index, sample index, ...).
    CounterRng derive(std::uint64_t id) const noexcept {
        CounterRng r(0);
        r.key_ = splitmix64(key_ ^ splitmix64(id + 0x632BE59BD9B4E019ull));
        return r;
    }

    std::uint64_t next_u64() noexcept { return splitmix64(key_ + 0xD1B54A32D192ED03ull * ++counter_); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) (multiply-shift, no modulo bias worth noting).
    __extension__ using Wide = unsigned __int128;

    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>((static_cast<Wide>(next_u64()) * n) >> 64);
    }

    /// Standard normal deviate (Box-Muller).
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0;
    bool has_spare_ = false;
};

} // namespace bftex

#endif // BFTEX_RANDOM_HPP_
