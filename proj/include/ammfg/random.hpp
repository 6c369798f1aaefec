#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ammfg {

//---------------------------------------------------------------------------//
// Counter-based random streams.
//
// Every draw is a pure function of (seed, stream key, counter), so a particle
// or trader sees the same noise no matter which worker thread simulates it or
// how many workers exist.
//---------------------------------------------------------------------------//

constexpr std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream purposes, so that e.g. initial states and increments never collide.
enum class StreamTag : std::uint64_t
{
    initial_state = 1,
    increment = 2,
    price_noise = 3,
    sampling = 4,
};

class CounterRng
{
  public:
    CounterRng(std::uint64_t seed,
               StreamTag tag,
               std::uint64_t a = 0,
               std::uint64_t b = 0)
    {
        key_ = splitmix64(seed);
        key_ = splitmix64(key_ ^ static_cast<std::uint64_t>(tag));
        key_ = splitmix64(key_ ^ a);
        key_ = splitmix64(key_ ^ (b + 0x632be59bd9b4e019ULL));
    }

    std::uint64_t bits(std::uint64_t counter) const
    {
        return splitmix64(key_ + counter * 0xd1b54a32d192ed03ULL);
    }

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t counter) const
    {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on counters (2i, 2i+1).
    double normal(std::uint64_t index) const
    {
        double const u1 = uniform(2 * index);
        double const u2 = uniform(2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1))
               * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::uint64_t key_;
};

}  // namespace ammfg
