#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "psa/error.hpp"

namespace psa {

using Integer = std::uint64_t;

inline constexpr Integer kMaxSieveBound = Integer{1} << 40;

// Primality of every integer in [lo, hi). Only odd integers are stored, one
// bit each, least-significant bit first; 2 is implied when lo <= 2.
class SieveSegment {
 public:
  SieveSegment(Integer lo, Integer hi, std::vector<std::uint64_t> odd_bits);

  Integer lo() const noexcept { return lo_; }
  Integer hi() const noexcept { return hi_; }
  Integer first_odd() const noexcept { return lo_ | 1; }
  std::size_t odd_count() const noexcept { return odd_count_; }
  std::span<const std::uint64_t> words() const noexcept { return bits_; }

  bool contains_two() const noexcept { return lo_ <= 2 && hi_ > 2; }
  bool is_prime(Integer k) const;
  Integer count() const noexcept;

  // Visits primes in ascending order. A visitor returning bool stops the walk
  // on false; the return value reports whether the walk ran to completion.
  template <class Visitor>
  bool for_each_prime(Visitor&& visit) const;

  bool operator==(const SieveSegment&) const = default;

  static std::size_t odd_count_for(Integer lo, Integer hi) noexcept;

 private:
  Integer lo_;
  Integer hi_;
  std::size_t odd_count_;
  std::vector<std::uint64_t> bits_;
};

struct PiCheckpoint {
  Integer n;
  Integer count;  // pi(n)
};

struct EngineConfig {
  // Odd entries per segment; a segment spans twice this many integers.
  std::size_t segment_odds = std::size_t{1} << 20;
  std::optional<std::filesystem::path> cache_dir;
  unsigned threads = 1;

  // Default configuration with cache_dir taken from PSA_CACHE_DIR.
  static EngineConfig from_environment();
};

class PrimeEngine {
 public:
  explicit PrimeEngine(EngineConfig config = EngineConfig::from_environment());

  const EngineConfig& config() const noexcept { return config_; }
  Integer segment_span() const noexcept { return 2 * static_cast<Integer>(config_.segment_odds); }

  // Throws invalid_range unless 2 <= lo < hi <= 2^40, range_too_large when
  // hi - lo exceeds one segment span.
  SieveSegment sieve_range(Integer lo, Integer hi) const;

  // Exact pi(n). Counts at segment boundaries are memoized, so repeated calls
  // only re-sieve the final partial segment.
  Integer prime_count(Integer n);

  std::vector<PiCheckpoint> checkpoints() const;

  // Segments tiling [2, n] in ascending order, aligned to multiples of the
  // segment span. The visitor may return bool to stop early.
  template <class Visitor>
  bool for_each_segment(Integer n, Visitor&& visit) const;

  template <class Visitor>
  bool stream_primes(Integer n, Visitor&& visit) const;

 private:
  std::shared_ptr<const std::vector<std::uint32_t>> base_primes(Integer hi) const;
  SieveSegment sieve_uncached(Integer lo, Integer hi) const;
  void extend_checkpoints(std::size_t boundary_index);

  EngineConfig config_;
  mutable std::mutex base_mutex_;
  mutable std::shared_ptr<const std::vector<std::uint32_t>> base_;
  mutable std::mutex checkpoint_mutex_;
  std::vector<Integer> boundary_counts_{0};  // [j] = pi(j * span - 1)
};

// Segment cache file: "PSA1", little-endian u64 lo, u64 hi, then the packed
// odd-index bitset in ceil(odd_count / 8) bytes, least-significant bit first.
void write_segment_file(const std::filesystem::path& path, const SieveSegment& segment);
SieveSegment read_segment_file(const std::filesystem::path& path);
std::filesystem::path segment_cache_path(const std::filesystem::path& dir, Integer lo, Integer hi);

namespace detail {
template <class Visitor, class Arg>
bool invoke_visitor(Visitor& visit, Arg&& arg) {
  if constexpr (std::is_same_v<std::invoke_result_t<Visitor&, Arg>, bool>) {
    return visit(std::forward<Arg>(arg));
  } else {
    visit(std::forward<Arg>(arg));
    return true;
  }
}
}  // namespace detail

template <class Visitor>
bool SieveSegment::for_each_prime(Visitor&& visit) const {
  if (contains_two() && !detail::invoke_visitor(visit, Integer{2})) return false;
  const Integer base = first_odd();
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    std::uint64_t word = bits_[w];
    while (word != 0) {
      const int bit = std::countr_zero(word);
      word &= word - 1;
      const Integer k = base + 2 * (static_cast<Integer>(w) * 64 + static_cast<Integer>(bit));
      if (!detail::invoke_visitor(visit, k)) return false;
    }
  }
  return true;
}

template <class Visitor>
bool PrimeEngine::for_each_segment(Integer n, Visitor&& visit) const {
  if (n < 2) return true;
  if (n >= kMaxSieveBound) throw Error(ErrorCode::invalid_range, "prime streams are limited to n < 2^40");
  const Integer span = segment_span();
  const Integer end = n + 1;
  for (Integer start = 0; start < end; start += span) {
    const Integer lo = start < 2 ? 2 : start;
    const Integer hi = start + span < end ? start + span : end;
    if (lo >= hi) continue;
    if (!detail::invoke_visitor(visit, sieve_range(lo, hi))) return false;
  }
  return true;
}

template <class Visitor>
bool PrimeEngine::stream_primes(Integer n, Visitor&& visit) const {
  return for_each_segment(n, [&](const SieveSegment& segment) {
    return segment.for_each_prime(visit);
  });
}

}  // namespace psa
