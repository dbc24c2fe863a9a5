#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <string>

#include "psa/error.hpp"
#include "psa/prime_engine.hpp"

namespace psa {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'S', 'A', '1'};
constexpr std::size_t kHeaderSize = 4 + 8 + 8;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(const std::string& in, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  return v;
}

}  // namespace

std::filesystem::path segment_cache_path(const std::filesystem::path& dir, Integer lo, Integer hi) {
  return dir / ("seg_" + std::to_string(lo) + "_" + std::to_string(hi) + ".psa");
}

void write_segment_file(const std::filesystem::path& path, const SieveSegment& segment) {
  std::string buffer(kMagic.begin(), kMagic.end());
  put_u64(buffer, segment.lo());
  put_u64(buffer, segment.hi());
  const std::size_t bytes = (segment.odd_count() + 7) / 8;
  const auto words = segment.words();
  for (std::size_t b = 0; b < bytes; ++b)
    buffer.push_back(static_cast<char>((words[b / 8] >> (8 * (b % 8))) & 0xFF));

  // Write-then-rename so concurrent readers never observe a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open " + tmp.string() + " for writing");
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (!out) throw Error(ErrorCode::io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

SieveSegment read_segment_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < kHeaderSize || !std::equal(kMagic.begin(), kMagic.end(), data.begin()))
    throw Error(ErrorCode::io, path.string() + " is not a segment cache file");

  const Integer lo = get_u64(data, 4);
  const Integer hi = get_u64(data, 12);
  if (lo < 2 || hi <= lo || hi > kMaxSieveBound)
    throw Error(ErrorCode::io, path.string() + " has an invalid range header");
  const std::size_t odds = SieveSegment::odd_count_for(lo, hi);
  const std::size_t bytes = (odds + 7) / 8;
  if (data.size() != kHeaderSize + bytes)
    throw Error(ErrorCode::io, path.string() + " has a truncated or oversized bitset");

  std::vector<std::uint64_t> words((odds + 63) / 64, 0);
  for (std::size_t b = 0; b < bytes; ++b)
    words[b / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[kHeaderSize + b]))
                    << (8 * (b % 8));
  return SieveSegment(lo, hi, std::move(words));
}

}  // namespace psa
