#include "infochain/keccak.hpp"

#include <array>
#include <bit>
#include <cstring>

namespace infochain {

namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr std::array<int, 24> kRotations = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                            27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};

constexpr std::array<int, 24> kPiLanes = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                          15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

constexpr std::size_t kRateBytes = 136;  // 1600 - 2*256 bits

void keccak_f1600(std::array<std::uint64_t, 25>& st) {
  std::array<std::uint64_t, 5> bc{};
  for (std::uint64_t rc : kRoundConstants) {
    // theta
    for (int i = 0; i < 5; ++i) bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
    for (int i = 0; i < 5; ++i) {
      const std::uint64_t t = bc[(i + 4) % 5] ^ std::rotl(bc[(i + 1) % 5], 1);
      for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
    }
    // rho + pi
    std::uint64_t t = st[1];
    for (int i = 0; i < 24; ++i) {
      const int j = kPiLanes[i];
      const std::uint64_t tmp = st[j];
      st[j] = std::rotl(t, kRotations[i]);
      t = tmp;
    }
    // chi
    for (int j = 0; j < 25; j += 5) {
      for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
      for (int i = 0; i < 5; ++i) st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
    }
    // iota
    st[0] ^= rc;
  }
}

void absorb_block(std::array<std::uint64_t, 25>& st, const std::uint8_t* block) {
  for (std::size_t lane = 0; lane < kRateBytes / 8; ++lane) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | block[lane * 8 + b];
    st[lane] ^= v;
  }
  keccak_f1600(st);
}

}  // namespace

Digest256 keccak256(std::span<const std::uint8_t> data) {
  std::array<std::uint64_t, 25> st{};
  std::size_t offset = 0;
  while (data.size() - offset >= kRateBytes) {
    absorb_block(st, data.data() + offset);
    offset += kRateBytes;
  }
  std::array<std::uint8_t, kRateBytes> last{};
  const std::size_t rest = data.size() - offset;
  if (rest > 0) std::memcpy(last.data(), data.data() + offset, rest);
  last[rest] ^= 0x01;
  last[kRateBytes - 1] ^= 0x80;
  absorb_block(st, last.data());

  Digest256 out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(st[i / 8] >> (8 * (i % 8)));
  }
  return out;
}

}  // namespace infochain
