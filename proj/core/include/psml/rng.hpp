#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace psml {

// Domain separation for the different consumers of randomness. The numeric
// values are part of the reproducibility contract; do not renumber.
enum class StreamTag : std::uint64_t {
  kPath = 1,
  kResample = 2,
  kSimulate = 3,
  kPrediction = 4,
  kBootstrap = 5,
  kReplicate = 6,
};

// Hashes an ordered tuple of words into a 64-bit stream key.
std::uint64_t stream_key(std::initializer_list<std::uint64_t> words);

// Counter-based generator: output n is a bijective mix of (key, n), so any
// stream can be reconstructed from its key alone, independent of which
// thread consumes it or in what order streams are created.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key) : key_(key) {}
  RandomStream(std::uint64_t seed, StreamTag tag,
               std::initializer_list<std::uint64_t> ids);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal() { return normal_(*this); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

}  // namespace psml
