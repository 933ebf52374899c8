#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "infochain/types.hpp"

namespace infochain {

/// SplitMix64. Each draw advances the state by 0x9E3779B97F4A7C15 and
/// finalises with
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z =  z ^ (z >> 31)
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }

  /// Uniform double in [0, 1) from the top 53 bits of one draw.
  double uniform();

  std::uint64_t draws() const { return draws_; }

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

 private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

/// Seed source available to a contract: block timestamp and mining
/// difficulty. derive() = low 64 bits of keccak256(uint256(timestamp) ||
/// uint256(difficulty)), both as 32-byte big-endian words.
struct SelectionSeed {
  std::uint64_t block_timestamp = 0;
  std::uint64_t difficulty = 0;

  std::uint64_t derive() const;

  friend bool operator==(const SelectionSeed&, const SelectionSeed&) = default;
};

/// Independent per-(agent, question) generator seed from a derived base seed.
std::uint64_t stream_seed(std::uint64_t base, std::size_t agent, std::size_t question);

/// Fisher-Yates prefix: draw r = next() % remaining, emit pool[r], swap it to
/// the end of the live region. Consumes exactly k draws.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, SplitMix64& rng);

struct RejectionSample {
  std::vector<std::size_t> indices;
  std::uint64_t draws_used = 0;
};

/// Draw next() % n until k distinct indices are found. Throws
/// DrawBudgetExceeded after `draw_cap` draws.
RejectionSample sample_indices_rejection(std::size_t n, std::size_t k, SplitMix64& rng,
                                         std::uint64_t draw_cap);

std::vector<AgentId> sample_peers(std::span<const AgentId> candidates, std::size_t k,
                                  const SelectionSeed& seed);

struct RejectionPeers {
  std::vector<AgentId> peers;
  std::uint64_t draws_used = 0;
};

inline constexpr std::uint64_t kDefaultDrawCap = 1U << 20;

RejectionPeers sample_peers_rejection(std::span<const AgentId> candidates, std::size_t k,
                                      const SelectionSeed& seed,
                                      std::uint64_t draw_cap = kDefaultDrawCap);

struct GoldenSampleVector {
  SelectionSeed seed;
  std::size_t candidates = 0;
  std::size_t k = 0;
  std::vector<std::size_t> indices;
};

/// "timestamp difficulty n k : i0 i1 ..." per line, '#' comments allowed.
std::vector<GoldenSampleVector> read_sample_vectors(const std::filesystem::path& path);

}  // namespace infochain
