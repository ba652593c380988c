#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace evaug {

std::uint64_t fnv1a64(std::string_view s);

/// splitmix64 finalizer; good enough to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic xoshiro256** generator with hand-rolled distributions.
/// Standard-library distributions are not bit-stable across implementations,
/// and every run artifact here must be byte-identical under a fixed seed,
/// including after a resume. All framework randomness flows through named
/// streams derived from one master seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for (master seed, purpose name, index). The index is
  /// typically an epoch number, so a resumed run can re-derive the exact
  /// stream an uninterrupted run would have used.
  static Rng stream(std::uint64_t master, std::string_view name,
                    std::uint64_t index = 0);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double real01();

  bool bernoulli(double p);

  /// Uniform in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = below(i + 1);
      using std::swap;
      swap(v[i], v[j]);
    }
  }

  /// k distinct items drawn uniformly without replacement, in draw order.
  /// Returns the whole input (shuffled) when k >= size.
  template <class T>
  std::vector<T> sample_without_replacement(std::vector<T> pool,
                                            std::size_t k) {
    if (k > pool.size()) k = pool.size();
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + below(pool.size() - i);
      using std::swap;
      swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::uint64_t s_[4];
};

}  // namespace evaug
