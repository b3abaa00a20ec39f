#pragma once

#include <cstdint>
#include <random>

namespace bicm {

/// Mixes a 64-bit value through one splitmix64 round.
std::uint64_t splitmix64(std::uint64_t x);

/// Seedable random substream.
///
/// Every (master_seed, stream_index) pair yields an independent stream whose
/// output does not depend on how many other streams exist or in which order
/// they are created. Simulation code gives each work unit (Monte Carlo
/// stratum, coded block) its own stream so that results are reproducible
/// under any thread count.
///
/// Gaussian variates come from a Box-Muller transform on uniforms derived
/// from the raw engine output, so the produced sequence is identical across
/// standard library implementations.
class RandomStream {
  public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in (0, 1].
    double uniform();

    /// Standard normal variate.
    double gaussian();

    /// One uniformly random bit.
    int bit() { return static_cast<int>(next_u64() >> 63); }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bicm
