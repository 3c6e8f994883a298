#pragma once

// Seedable counter-based random stream (Philox4x32-10).  A stream is fully
// determined by (seed, stream id); substream(i) derives an independent child
// stream, so parallel workers can be given disjoint streams deterministically.

#include <array>
#include <complex>
#include <cstdint>

namespace conewhit {

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Child stream i; hierarchical splitting, deterministic in (seed, stream, i).
    RandomStream substream(std::uint64_t i) const;

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    double uniform();  // open interval (0,1)
    double normal();   // standard normal (Box-Muller, second variate cached)
    double gamma(double shape);                // unit scale; shape > 0
    double gamma(double shape, double scale);
    double chi_square(double df);              // = gamma(df/2, scale 2), df > 0
    std::complex<double> complex_normal();     // E|z|^2 = 1 (variance 1/2 per part)

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

namespace detail {
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);
std::uint64_t splitmix64(std::uint64_t x);
}  // namespace detail

}  // namespace conewhit
