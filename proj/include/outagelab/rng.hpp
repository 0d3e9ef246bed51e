#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace outagelab {

// Philox4x32-10 counter-based generator. A draw is addressed by
// (seed, stream, counter), so any sample index can be generated
// independently of execution order.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t stream,
                                        std::uint64_t counter);

// Derive an independent sub-seed for a tagged purpose (table build,
// pilot run, ...) without consuming stream space.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index);

// Sequential view over one (seed, stream) pair.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  // Uniform on (0, 1].
  double uniform();

  // Standard normal (Box-Muller, pairs cached).
  double normal();

  // Circularly symmetric complex Gaussian with total variance `variance`.
  std::complex<double> complex_normal(double variance);

  std::uint64_t next_u64();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int word_ = 4;
  bool has_cached_ = false;
  double cached_ = 0.0;

  std::uint32_t next_u32();
};

}  // namespace outagelab
