#ifndef ELLATTR_RNG_HPP
#define ELLATTR_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

namespace ellattr {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Seedable random stream. A stream is identified by (seed, stream id);
/// substreams derived from distinct ids are independent and must never be
/// shared between workers. Same (seed, id) always replays the same sequence.
class rng_stream {
public:
    explicit rng_stream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream),
          gen_(detail::splitmix64(detail::splitmix64(seed) ^ stream)) {}

    rng_stream substream(std::uint64_t index) const {
        return rng_stream(seed_, detail::splitmix64(stream_ ^ (index + 1)));
    }

    std::uint64_t raw() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    /// Two independent standard normals (Box-Muller).
    std::pair<double, double> gaussian_pair() {
        const double u = 1.0 - uniform();  // (0, 1]
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * uniform();
        return {r * std::cos(a), r * std::sin(a)};
    }

    std::complex<double> gaussian_complex() {
        auto [re, im] = gaussian_pair();
        return {re, im};
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 gen_;
};

}  // namespace ellattr

#endif
