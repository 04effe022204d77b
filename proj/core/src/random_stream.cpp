// SPDX-License-Identifier: Apache-2.0
#include "umimc/random_stream.hpp"

namespace umimc {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t key) : key_(key), engine_(mix64(key)) {}

RandomStream RandomStream::split(std::uint64_t child) const {
  return RandomStream(mix64(key_ ^ mix64(child + 0x9e3779b97f4a7c15ull)));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::normal(double mean, double stddev) { return mean + stddev * normal(); }

}  // namespace umimc
