#pragma once

#include <array>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "infochain/bytes.hpp"
#include "infochain/types.hpp"

namespace infochain {

// A hash with a 3k-bit digest binds a k-bit message when the committer mixes
// in a k-bit random key. With keccak256 that gives k = 85, and at two bits
// per answer one commitment holds 42 answers.
inline constexpr std::size_t kDigestBits = 256;
inline constexpr std::size_t kMessageBits = kDigestBits / 3;
inline constexpr std::size_t kKeyBits = kMessageBits;
inline constexpr std::size_t kMaxAnswersPerCommitment = kMessageBits / 2;

/// S occupies bits [0, 85), m occupies [85, 170), bits [170, 176) are zero.
inline constexpr std::size_t kLayoutBytes = 22;
using CommitLayout = std::array<std::uint8_t, kLayoutBytes>;

static_assert(kMessageBits == 85);
static_assert(kMaxAnswersPerCommitment == 42);
static_assert(kLayoutBytes * 8 >= kKeyBits + kMessageBits);

struct AnswerSlot {
  bool answered = false;
  bool answer = false;

  friend bool operator==(const AnswerSlot&, const AnswerSlot&) = default;
};

/// Up to 42 (answered, answer) slots with a fixed slot-to-question mapping.
class PackedAnswerVector {
 public:
  PackedAnswerVector() = default;

  /// Slot j is (1, bit) when question_order[j] appears in `answers`, (0, 0)
  /// otherwise. Throws TooManyAnswers, UnknownQuestion or DuplicateAnswer.
  static PackedAnswerVector pack(std::span<const std::pair<QuestionId, bool>> answers,
                                 std::vector<QuestionId> question_order);

  /// Rebuilds a vector from its 85-bit message encoding (see encode_message).
  static PackedAnswerVector decode(std::span<const std::uint8_t> message,
                                   std::vector<QuestionId> question_order);

  const std::vector<AnswerSlot>& slots() const { return slots_; }
  const std::vector<QuestionId>& question_order() const { return question_order_; }

  /// (question, answer) for answered slots, in slot order.
  std::vector<std::pair<QuestionId, bool>> answers() const;

  /// m as 11 bytes, slot j at bits 2j (answered) and 2j+1 (answer).
  std::array<std::uint8_t, 11> encode_message() const;

  /// Copy with one of the 2*slots message bits flipped.
  PackedAnswerVector with_bit_flipped(std::size_t bit) const;

  friend bool operator==(const PackedAnswerVector&, const PackedAnswerVector&) = default;

 private:
  std::vector<AnswerSlot> slots_;
  std::vector<QuestionId> question_order_;
};

/// Exactly 85 random bits; the three high bits of the last byte stay zero.
class SecretKey {
 public:
  static constexpr std::size_t kBytes = (kKeyBits + 7) / 8;

  SecretKey() = default;

  /// Throws InvalidArgument when any bit at or above 85 is set.
  static SecretKey from_bytes(const std::array<std::uint8_t, kBytes>& bytes);

  /// Takes the low 32 bits of successive `gen()` outputs, so the key is
  /// reproducible across standard libraries for a deterministic generator.
  template <std::uniform_random_bit_generator Generator>
  static SecretKey from_generator(Generator& gen) {
    static_assert(Generator::min() == 0 && Generator::max() >= 0xFFFFFFFFULL);
    std::array<std::uint8_t, kBytes> bytes{};
    for (std::size_t i = 0; i < kBytes; i += 4) {
      const auto word = static_cast<std::uint32_t>(gen());
      for (std::size_t b = 0; b < 4 && i + b < kBytes; ++b) {
        bytes[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
    bytes.back() &= kLastByteMask;
    return SecretKey(bytes);
  }

  /// Draws from std::random_device.
  static SecretKey generate();

  const std::array<std::uint8_t, kBytes>& bytes() const { return bytes_; }
  bool bit(std::size_t i) const { return (bytes_[i / 8] >> (i % 8)) & 1U; }
  SecretKey with_bit_flipped(std::size_t i) const;

  friend bool operator==(const SecretKey&, const SecretKey&) = default;

 private:
  static constexpr std::uint8_t kLastByteMask = (1U << (kKeyBits % 8)) - 1;
  explicit SecretKey(const std::array<std::uint8_t, kBytes>& bytes) : bytes_(bytes) {}

  std::array<std::uint8_t, kBytes> bytes_{};
};

struct Commitment {
  Digest256 digest{};

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

/// S || m packed into the 22-byte canonical layout, LSB-first within bytes.
CommitLayout canonical_layout(const PackedAnswerVector& answers, const SecretKey& key);

Commitment commit(const PackedAnswerVector& answers, const SecretKey& key);

bool verify_reveal(const Commitment& commitment, const PackedAnswerVector& answers,
                   const SecretKey& key);

/// Number of commitments needed for `answers` answers at `capacity` per batch.
std::size_t batch_count(std::size_t answers, std::size_t capacity = kMaxAnswersPerCommitment);

struct GoldenCommitVector {
  CommitLayout layout{};
  Digest256 digest{};
};

/// One "layout_hex digest_hex" pair per line; blank lines and '#' comments
/// are skipped.
std::vector<GoldenCommitVector> read_commit_vectors(const std::filesystem::path& path);
void write_commit_vectors(const std::filesystem::path& path,
                          std::span<const GoldenCommitVector> vectors);

}  // namespace infochain
