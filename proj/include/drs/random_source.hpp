#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace drs {

/// Seedable 64-bit generator identified by (seed, stream). Identical pairs give
/// identical sequences; distinct stream ids give unrelated sequences. The
/// engine is seeded through std::seed_seq, whose algorithm is fixed by the
/// standard, so sequences are reproducible across platforms.
///
/// A RandomSource belongs to one chain or replicate at a time, so copying is
/// disabled; use derive() to hand out child streams.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  RandomSource(const RandomSource&) = delete;
  RandomSource& operator=(const RandomSource&) = delete;
  RandomSource(RandomSource&&) noexcept = default;
  RandomSource& operator=(RandomSource&&) noexcept = default;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Fresh source for child `index` of this stream. Depends only on
  /// (seed, stream, index), not on how many draws this source has made.
  RandomSource derive(std::uint64_t index) const;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace drs
