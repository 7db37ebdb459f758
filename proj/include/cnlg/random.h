// Copyright 2026 The cnlg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CNLG_RANDOM_H_
#define CNLG_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace cnlg {

// Seedable random stream with a fixed algorithm identity so that splits and
// augmentations are reproducible on any conforming implementation:
//
//   engine    std::mt19937_64 (output sequence fixed by the C++ standard)
//   integers  UniformInt(lo, hi) rejects raw 64-bit draws >= the largest
//             multiple of (hi - lo + 1), then returns lo + draw % range
//   reals     (draw >> 11) * 2^-53, in [0, 1)
//   shuffle   Fisher-Yates from the back, j = UniformInt(0, i)
//
// The <random> distributions are not used because their output is
// implementation defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64+rejection-int+fisher-yates/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform over the closed range [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  double UniformReal();

  // Standard Gumbel(0, 1) draw.
  double Gumbel();

  template <typename T>
  void Shuffle(std::span<T> items) {
    if (items.empty()) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(
          UniformInt(0, static_cast<std::int64_t>(i)));
      std::swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t Fnv1a64(std::string_view data);
std::uint64_t SplitMix64(std::uint64_t x);

// Seed for an independent stream keyed by a string (e.g. a record id).
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view key) {
  return SplitMix64(seed ^ Fnv1a64(key));
}

}  // namespace cnlg

#endif  // CNLG_RANDOM_H_
