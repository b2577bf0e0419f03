#ifndef SHIELDPERC_RNG_HPP
#define SHIELDPERC_RNG_HPP

#include <cstdint>

namespace shieldperc {

// Counter-based splittable RNG in the splitmix64 family.  Every draw is a
// pure function of (seed, stream, counter), so edge states and trials are
// reproducible regardless of evaluation order or thread count.

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
    z = detail::mix64(z ^ detail::mix64(stream + 0x9e3779b97f4a7c15ull));
    z = detail::mix64(z ^ detail::mix64(counter + 0x9e3779b97f4a7c15ull));
    return z;
}

// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit_double(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Sequential view over one (seed, stream) pair.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return counter_hash(seed_, stream_, counter_++); }
    double next_double() { return to_unit_double(next_u64()); }

    // Uniform index in [0, m); m is tiny here (a lattice dimension), so the
    // modulo bias of at most m/2^64 is far below statistical resolution.
    int next_index(int m) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(m)); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace shieldperc

#endif
