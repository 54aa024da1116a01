#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace prevsim {

/// Explicit seed carried by every randomized operation.
struct Seed {
  std::uint64_t value = 0;

  bool operator==(const Seed&) const = default;
};

/// Seed for the i-th iteration of a derived sequence: base + i (wrapping).
constexpr Seed derive_seed(Seed base, std::int64_t offset) noexcept {
  return Seed{base.value + static_cast<std::uint64_t>(offset)};
}

/// Named sub-streams so that independent consumers of one seed do not share
/// random numbers.
enum class Stream : std::uint32_t {
  Default = 0,
  Split = 1,
  Folds = 2,
  Swap = 3,
  Model = 4,
  RandomGuess = 5,
  Synth = 6,
};

/// Deterministic random source. Only the engine (std::mt19937_64, fully
/// specified by the standard) is taken from the library; the distributions are
/// implemented here so outputs do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(Seed seed, Stream stream = Stream::Default, std::uint32_t substream = 0);

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on the open interval (lo, hi).
  double uniform_open(double lo, double hi);
  /// Uniform integer on [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal variate (Marsaglia polar method).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace prevsim
