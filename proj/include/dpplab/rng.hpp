#ifndef DPPLAB_RNG_HPP
#define DPPLAB_RNG_HPP

#include <array>
#include <cstdint>

namespace dpp {

// Keying for reproducible streams: a (seed, stream) pair addresses an
// independent random sequence. Generator id: "philox4x32-10/v1".
struct SeedSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Philox 4x32 with 10 rounds, per the Random123 specification.
// Counter-based: the key is the 64-bit seed, the upper counter half is the
// 64-bit stream index, the lower half enumerates blocks within the stream.
// Identical (seed, stream) sequences are bit-identical on any platform.
class Philox {
 public:
  explicit Philox(SeedSpec s) noexcept : Philox(s.seed, s.stream) {}
  Philox(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) noexcept {
    round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
      round(ctr, key);
    }
    return ctr;
  }

  std::uint64_t next_u64() noexcept {
    if (pos_ == 2) refill();
    const int half = pos_++;
    return static_cast<std::uint64_t>(buf_[2 * half]) |
           (static_cast<std::uint64_t>(buf_[2 * half + 1]) << 32);
  }

  // 53-bit uniform in [0,1).
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static void round(std::array<std::uint32_t, 4>& c,
                    const std::array<std::uint32_t, 2>& k) noexcept {
    const std::uint64_t p0 = 0xD2511F53ull * c[0];
    const std::uint64_t p1 = 0xCD9E8D57ull * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c[0] = hi1 ^ c[1] ^ k[0];
    c[1] = lo1;
    c[2] = hi0 ^ c[3] ^ k[1];
    c[3] = lo0;
  }

  void refill() noexcept {
    buf_ = block({static_cast<std::uint32_t>(counter_),
                  static_cast<std::uint32_t>(counter_ >> 32),
                  static_cast<std::uint32_t>(stream_),
                  static_cast<std::uint32_t>(stream_ >> 32)},
                 key_);
    ++counter_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 2;
};

}  // namespace dpp

#endif
