#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace gtransnet {

/// Philox4x32-10 counter-based generator.
///
/// A stream is identified by a 64-bit key (the run seed) and the upper half
/// of the 128-bit counter (the stream id); the lower half counts blocks.
/// Distinct stream ids therefore never overlap, and drawing more numbers from
/// one stream cannot shift another.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  PhiloxEngine() : PhiloxEngine(0, 0) {}
  PhiloxEngine(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Raw ten-round bijection, exposed for known-answer tests.
  static Block bijection(Block counter, Key key);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Stable 64-bit id for a named stream (FNV-1a, then mixed with `index`).
std::uint64_t stream_id(std::string_view name, std::uint64_t index = 0);

/// Engine for the stream `name[index]` under `seed`.
PhiloxEngine make_stream(std::uint64_t seed, std::string_view name,
                         std::uint64_t index = 0);

}  // namespace gtransnet
