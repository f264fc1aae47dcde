// Copyright 2026 the arep authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>

namespace arep {

// 64-bit finalizer used both as the output function of the generator and as
// the stream-derivation hash. Constants are the standard splitmix64 ones.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Counter-based pseudo-random stream: output_i = mix64(key + i * gamma),
/// i.e. splitmix64 keyed by `key`. Streams form a tree: child(id) derives a
/// new key by hashing (key, id) and is independent of how many draws the
/// parent has made. Identical (seed, child path) gives bit-identical output
/// on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }

  /// Uniform double strictly inside (0, 1): (x >> 11 + 1/2) * 2^-53.
  double next_unit() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on (lo, hi).
  double next_uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_unit();
  }

  bool next_bernoulli(double prob) noexcept { return next_unit() < prob; }

  /// Fills `out` with independent signs in {-1, +1}, 64 per next_u64 call.
  void fill_signs(std::span<double> out) noexcept {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t bits = next_u64();
      for (int b = 0; b < 64 && i < out.size(); ++b, ++i)
        out[i] = (bits >> b) & 1u ? 1.0 : -1.0;
    }
  }

  /// Derived stream; does not consume or depend on parent draws.
  RngStream child(std::uint64_t id) const noexcept {
    return RngStream(mix64(mix64(key_ ^ 0x9E6C63D0876A9A35ULL) + id));
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace arep
