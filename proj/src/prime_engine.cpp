#include "psa/prime_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <string>

#include "psa/error.hpp"

namespace psa {

namespace {

Integer isqrt(Integer n) {
  auto r = static_cast<Integer>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Odd primes up to limit inclusive, by a plain odd-only sieve.
std::vector<std::uint32_t> small_odd_primes(Integer limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 3) return primes;
  const std::size_t size = static_cast<std::size_t>((limit - 1) / 2);  // index i <-> 2i + 3
  std::vector<bool> composite(size, false);
  for (std::size_t i = 0; i < size; ++i) {
    if (composite[i]) continue;
    const Integer p = 2 * i + 3;
    primes.push_back(static_cast<std::uint32_t>(p));
    for (Integer j = (p * p - 3) / 2; j < size; j += p) composite[j] = true;
  }
  return primes;
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_range: return "invalid-range";
    case ErrorCode::range_too_large: return "range-too-large";
    case ErrorCode::unknown_id: return "unknown-id";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::hypothesis_violation: return "hypothesis-violation";
    case ErrorCode::max_subdivisions: return "max-subdivision-exceeded";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::io: return "io";
    case ErrorCode::callback_failed: return "callback-failed";
  }
  return "unknown";
}

std::size_t SieveSegment::odd_count_for(Integer lo, Integer hi) noexcept {
  const Integer first = lo | 1;
  return first >= hi ? 0 : static_cast<std::size_t>((hi - first + 1) / 2);
}

SieveSegment::SieveSegment(Integer lo, Integer hi, std::vector<std::uint64_t> odd_bits)
    : lo_(lo), hi_(hi), odd_count_(odd_count_for(lo, hi)), bits_(std::move(odd_bits)) {
  if (lo < 2 || hi <= lo) throw Error(ErrorCode::invalid_range, "segment requires 2 <= lo < hi");
  if (bits_.size() != (odd_count_ + 63) / 64)
    throw Error(ErrorCode::invalid_argument, "segment bitset size does not match range");
  if (const auto tail = odd_count_ % 64; tail != 0) bits_.back() &= (std::uint64_t{1} << tail) - 1;
}

bool SieveSegment::is_prime(Integer k) const {
  if (k < lo_ || k >= hi_) throw Error(ErrorCode::invalid_range, "value outside segment");
  if (k == 2) return true;
  if (k % 2 == 0) return false;
  const auto i = static_cast<std::size_t>((k - first_odd()) / 2);
  return (bits_[i / 64] >> (i % 64)) & 1U;
}

Integer SieveSegment::count() const noexcept {
  Integer total = contains_two() ? 1 : 0;
  for (const auto word : bits_) total += static_cast<Integer>(std::popcount(word));
  return total;
}

EngineConfig EngineConfig::from_environment() {
  EngineConfig config;
  if (const char* dir = std::getenv("PSA_CACHE_DIR"); dir != nullptr && *dir != '\0')
    config.cache_dir = std::filesystem::path(dir);
  return config;
}

PrimeEngine::PrimeEngine(EngineConfig config) : config_(std::move(config)) {
  if (config_.segment_odds == 0)
    throw Error(ErrorCode::invalid_argument, "segment size must be positive");
  if (config_.threads == 0) config_.threads = 1;
}

std::shared_ptr<const std::vector<std::uint32_t>> PrimeEngine::base_primes(Integer hi) const {
  const Integer needed = isqrt(hi);
  std::lock_guard lock(base_mutex_);
  if (!base_ || base_->empty() || base_->back() < needed) {
    // Grow geometrically so a stream over increasing segments recomputes rarely.
    Integer limit = std::max<Integer>(needed, 1024);
    if (base_ && !base_->empty()) limit = std::max<Integer>(limit, 2 * Integer{base_->back()});
    limit = std::min<Integer>(limit, isqrt(kMaxSieveBound));
    base_ = std::make_shared<const std::vector<std::uint32_t>>(small_odd_primes(limit));
  }
  return base_;
}

SieveSegment PrimeEngine::sieve_uncached(Integer lo, Integer hi) const {
  const std::size_t odds = SieveSegment::odd_count_for(lo, hi);
  std::vector<std::uint64_t> bits((odds + 63) / 64, ~std::uint64_t{0});
  const Integer first = lo | 1;

  const auto primes = base_primes(hi);
  const Integer last = hi - 1;
  for (const std::uint32_t prime : *primes) {
    const Integer p = prime;
    if (p * p > last) break;
    Integer start = std::max(p * p, (lo + p - 1) / p * p);
    if (start % 2 == 0) start += p;
    for (Integer j = (start - first) / 2; j < odds; j += p) bits[j / 64] &= ~(std::uint64_t{1} << (j % 64));
  }
  return SieveSegment(lo, hi, std::move(bits));
}

SieveSegment PrimeEngine::sieve_range(Integer lo, Integer hi) const {
  if (lo < 2 || lo >= hi || hi > kMaxSieveBound)
    throw Error(ErrorCode::invalid_range,
                "sieve range [" + std::to_string(lo) + ", " + std::to_string(hi) + ") is invalid");
  if (hi - lo > segment_span())
    throw Error(ErrorCode::range_too_large,
                "sieve range of " + std::to_string(hi - lo) + " exceeds segment budget of " +
                    std::to_string(segment_span()));
  if (!config_.cache_dir) return sieve_uncached(lo, hi);

  const auto path = segment_cache_path(*config_.cache_dir, lo, hi);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      auto cached = read_segment_file(path);
      if (cached.lo() == lo && cached.hi() == hi) return cached;
    } catch (const Error&) {
      // corrupt entry; fall through and rewrite it
    }
  }
  auto segment = sieve_uncached(lo, hi);
  try {
    std::filesystem::create_directories(*config_.cache_dir, ec);
    write_segment_file(path, segment);
  } catch (const Error&) {
    // an unwritable cache only costs recomputation
  }
  return segment;
}

void PrimeEngine::extend_checkpoints(std::size_t boundary_index) {
  const Integer span = segment_span();
  while (boundary_counts_.size() <= boundary_index) {
    const std::size_t next = boundary_counts_.size();  // boundary j = next covers [.., next*span)
    const std::size_t batch = std::min<std::size_t>(config_.threads, boundary_index + 1 - next);
    std::vector<std::future<Integer>> counts;
    counts.reserve(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      const Integer start = (next - 1 + b) * span;
      const Integer lo = std::max<Integer>(start, 2);
      const Integer hi = start + span;
      const auto policy = batch > 1 ? std::launch::async : std::launch::deferred;
      counts.push_back(std::async(policy, [this, lo, hi] { return lo < hi ? sieve_range(lo, hi).count() : 0; }));
    }
    for (auto& count : counts) boundary_counts_.push_back(boundary_counts_.back() + count.get());
  }
}

Integer PrimeEngine::prime_count(Integer n) {
  if (n < 2) throw Error(ErrorCode::invalid_range, "prime_count requires n >= 2");
  if (n >= kMaxSieveBound) throw Error(ErrorCode::invalid_range, "prime_count limited to n < 2^40");
  const Integer span = segment_span();
  const Integer end = n + 1;
  const auto boundary = static_cast<std::size_t>(end / span);
  Integer counted;
  {
    std::lock_guard lock(checkpoint_mutex_);
    extend_checkpoints(boundary);
    counted = boundary_counts_[boundary];
  }
  const Integer lo = std::max<Integer>(boundary * span, 2);
  if (lo < end) counted += sieve_range(lo, end).count();
  return counted;
}

std::vector<PiCheckpoint> PrimeEngine::checkpoints() const {
  std::lock_guard lock(checkpoint_mutex_);
  std::vector<PiCheckpoint> out;
  for (std::size_t j = 1; j < boundary_counts_.size(); ++j)
    out.push_back({static_cast<Integer>(j) * segment_span() - 1, boundary_counts_[j]});
  return out;
}

}  // namespace psa
