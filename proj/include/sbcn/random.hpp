#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sbcn {

/// Pseudo-random stream used throughout the library.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard, and
/// implements the uniform draws by hand so that results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream derived from a base seed and a stream name.
    static Rng substream(std::uint64_t seed, std::string_view name);

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] (inclusive), unbiased.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    bool bernoulli(double p) { return uniform() < p; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Rng::uniform_int.
template <typename Container>
void shuffle(Container& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, i - 1));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace sbcn
