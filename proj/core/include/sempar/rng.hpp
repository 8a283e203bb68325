#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace sempar {

// All randomness flows from one root seed through named streams, so the
// amount of parallelism cannot change results.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
    std::uint64_t h = 1469598103934665603ull ^ base;
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    // splitmix64 finalizer
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1); bit-stable across platforms.
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return gen_(); }

    std::size_t below(std::size_t n) { return n == 0 ? 0 : std::size_t(gen_() % n); }

private:
    std::mt19937_64 gen_;
};

}  // namespace sempar
