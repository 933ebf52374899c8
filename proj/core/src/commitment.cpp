#include "infochain/commitment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "infochain/error.hpp"
#include "infochain/keccak.hpp"

namespace infochain {

namespace {

void set_bit(std::span<std::uint8_t> bytes, std::size_t i, bool value) {
  if (value) bytes[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
}

bool get_bit(std::span<const std::uint8_t> bytes, std::size_t i) {
  return (bytes[i / 8] >> (i % 8)) & 1U;
}

void check_order(const std::vector<QuestionId>& order) {
  if (order.size() > kMaxAnswersPerCommitment) {
    throw Error(Errc::TooManyAnswers,
                fmt::format("{} slots exceed the {}-answer capacity", order.size(),
                            kMaxAnswersPerCommitment));
  }
}

}  // namespace

PackedAnswerVector PackedAnswerVector::pack(std::span<const std::pair<QuestionId, bool>> answers,
                                            std::vector<QuestionId> question_order) {
  if (answers.size() > kMaxAnswersPerCommitment) {
    throw Error(Errc::TooManyAnswers, fmt::format("{} answers exceed the {}-answer capacity",
                                                  answers.size(), kMaxAnswersPerCommitment));
  }
  check_order(question_order);

  std::unordered_map<std::string_view, std::size_t> slot_of;
  for (std::size_t j = 0; j < question_order.size(); ++j) {
    if (!slot_of.emplace(question_order[j], j).second) {
      throw Error(Errc::DuplicateIdentifier, "question '" + question_order[j] + "' repeated in order");
    }
  }

  PackedAnswerVector v;
  v.slots_.resize(question_order.size());
  for (const auto& [question, bit] : answers) {
    auto it = slot_of.find(question);
    if (it == slot_of.end()) {
      throw Error(Errc::UnknownQuestion, "question '" + question + "' not in slot order");
    }
    AnswerSlot& slot = v.slots_[it->second];
    if (slot.answered) throw Error(Errc::DuplicateAnswer, "question '" + question + "' answered twice");
    slot = AnswerSlot{true, bit};
  }
  v.question_order_ = std::move(question_order);
  return v;
}

PackedAnswerVector PackedAnswerVector::decode(std::span<const std::uint8_t> message,
                                              std::vector<QuestionId> question_order) {
  check_order(question_order);
  if (message.size() * 8 < 2 * question_order.size()) {
    throw Error(Errc::InvalidArgument, "message too short for slot order");
  }
  PackedAnswerVector v;
  v.slots_.resize(question_order.size());
  for (std::size_t j = 0; j < v.slots_.size(); ++j) {
    const bool answered = get_bit(message, 2 * j);
    const bool answer = get_bit(message, 2 * j + 1);
    if (!answered && answer) {
      throw Error(Errc::InvalidArgument, fmt::format("slot {} has an answer bit but no answered flag", j));
    }
    v.slots_[j] = AnswerSlot{answered, answer};
  }
  v.question_order_ = std::move(question_order);
  return v;
}

std::vector<std::pair<QuestionId, bool>> PackedAnswerVector::answers() const {
  std::vector<std::pair<QuestionId, bool>> out;
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    if (slots_[j].answered) out.emplace_back(question_order_[j], slots_[j].answer);
  }
  return out;
}

std::array<std::uint8_t, 11> PackedAnswerVector::encode_message() const {
  std::array<std::uint8_t, 11> m{};
  for (std::size_t j = 0; j < slots_.size(); ++j) {
    set_bit(m, 2 * j, slots_[j].answered);
    set_bit(m, 2 * j + 1, slots_[j].answer);
  }
  return m;
}

PackedAnswerVector PackedAnswerVector::with_bit_flipped(std::size_t bit) const {
  if (bit >= 2 * slots_.size()) throw Error(Errc::InvalidArgument, "message bit out of range");
  PackedAnswerVector copy = *this;
  AnswerSlot& slot = copy.slots_[bit / 2];
  if (bit % 2 == 0) {
    slot.answered = !slot.answered;
  } else {
    slot.answer = !slot.answer;
  }
  return copy;
}

SecretKey SecretKey::from_bytes(const std::array<std::uint8_t, kBytes>& bytes) {
  if ((bytes.back() & ~kLastByteMask) != 0) {
    throw Error(Errc::InvalidArgument, "secret key has bits set beyond bit 84");
  }
  return SecretKey(bytes);
}

SecretKey SecretKey::generate() {
  std::random_device rd;
  return from_generator(rd);
}

SecretKey SecretKey::with_bit_flipped(std::size_t i) const {
  if (i >= kKeyBits) throw Error(Errc::InvalidArgument, "key bit out of range");
  SecretKey copy = *this;
  copy.bytes_[i / 8] ^= static_cast<std::uint8_t>(1U << (i % 8));
  return copy;
}

CommitLayout canonical_layout(const PackedAnswerVector& answers, const SecretKey& key) {
  CommitLayout layout{};
  for (std::size_t i = 0; i < kKeyBits; ++i) set_bit(layout, i, key.bit(i));
  const auto message = answers.encode_message();
  for (std::size_t i = 0; i < kMessageBits; ++i) set_bit(layout, kKeyBits + i, get_bit(message, i));
  return layout;
}

Commitment commit(const PackedAnswerVector& answers, const SecretKey& key) {
  const CommitLayout layout = canonical_layout(answers, key);
  return Commitment{keccak256(layout)};
}

bool verify_reveal(const Commitment& commitment, const PackedAnswerVector& answers,
                   const SecretKey& key) {
  return commit(answers, key) == commitment;
}

std::size_t batch_count(std::size_t answers, std::size_t capacity) {
  if (capacity == 0) throw Error(Errc::InvalidArgument, "batch capacity must be positive");
  return (answers + capacity - 1) / capacity;
}

std::vector<GoldenCommitVector> read_commit_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<GoldenCommitVector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string layout_hex, digest_hex;
    if (!(fields >> layout_hex >> digest_hex)) {
      throw Error(Errc::ParseError, "malformed golden vector line: " + line);
    }
    const Bytes layout = from_hex(layout_hex);
    const Bytes digest = from_hex(digest_hex);
    if (layout.size() != kLayoutBytes || digest.size() != 32) {
      throw Error(Errc::ParseError, "golden vector has wrong field width: " + line);
    }
    GoldenCommitVector v;
    std::copy(layout.begin(), layout.end(), v.layout.begin());
    std::copy(digest.begin(), digest.end(), v.digest.begin());
    out.push_back(v);
  }
  return out;
}

void write_commit_vectors(const std::filesystem::path& path,
                          std::span<const GoldenCommitVector> vectors) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << "# layout_hex digest_hex\n";
  for (const auto& v : vectors) out << to_hex(v.layout) << ' ' << to_hex(v.digest) << '\n';
}

}  // namespace infochain
