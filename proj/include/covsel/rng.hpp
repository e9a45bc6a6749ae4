#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace covsel {

/// Named sub-streams of a master seed. Every random decision in the
/// toolkit draws from a generator seeded by derive_seed(master, stream,
/// counter), so adding parallelism or reordering work never changes the
/// numbers produced.
enum class SeedStream : std::uint64_t {
  GraphEdges = 1,
  HubTargets = 2,
  PrecisionCoeffs = 3,
  Sampling = 4,
  ValidationSplit = 5,
  StepSplit = 6,
  EdgeOrder = 7,
  BenchExperiment = 8,
  BenchHoldout = 9,
  MonteCarlo = 10,
};

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                 std::uint64_t counter = 0) {
  return mix64(mix64(master ^ (0xa076bc9d2ae1b8d5ULL *
                               static_cast<std::uint64_t>(stream))) +
               counter);
}

/// Deterministic random source. Uniforms come straight from mt19937_64;
/// normals use Box-Muller on those uniforms rather than
/// std::normal_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  // [0, n); modulo mapping (bias is irrelevant at these ranges and keeps
  // the draw count per call fixed)
  int uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

// in-place Fisher-Yates; stable across standard libraries, unlike
// std::shuffle
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    const int j = rng.uniform_int(i + 1);
    std::swap(v[i], v[static_cast<std::size_t>(j)]);
  }
}

/// Split {0..n-1} into (rest, chosen) with |chosen| = k; both halves are
/// returned sorted so row order of the original data is preserved.
inline std::pair<std::vector<int>, std::vector<int>> split_indices(
    int n, int k, Rng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  shuffle(idx, rng);
  std::vector<int> chosen(idx.begin(), idx.begin() + k);
  std::vector<int> rest(idx.begin() + k, idx.end());
  std::sort(chosen.begin(), chosen.end());
  std::sort(rest.begin(), rest.end());
  return {rest, chosen};
}

}  // namespace covsel
