#include "psml/rng.hpp"

namespace psml {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t stream_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  std::uint64_t position = 0;
  for (std::uint64_t w : words) {
    ++position;
    h = mix(h ^ mix(w + position * kGolden));
  }
  return h;
}

RandomStream::RandomStream(std::uint64_t seed, StreamTag tag,
                           std::initializer_list<std::uint64_t> ids)
    : key_(0) {
  std::uint64_t h = stream_key({seed, static_cast<std::uint64_t>(tag)});
  for (std::uint64_t id : ids) h = stream_key({h, id});
  key_ = h;
}

RandomStream::result_type RandomStream::operator()() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double RandomStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace psml
