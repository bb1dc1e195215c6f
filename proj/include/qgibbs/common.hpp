// Copyright 2026 The qgibbs Authors
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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qgibbs {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

using cplx = std::complex<double>;

// Invalid user-facing configuration (bad flags, malformed config files,
// size limits). The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A mathematical guarantee failed at runtime (bound violation, norm drift
// beyond tolerance). The CLI maps this to exit code 3.
class invariant_violation : public std::runtime_error {
 public:
  explicit invariant_violation(const std::string& msg)
      : std::runtime_error(msg) {}
};

// splitmix64 step; used to derive independent per-task seeds from a master
// seed so that concurrent work stays deterministic.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qgibbs
