#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "infochain/types.hpp"

namespace infochain {

enum class OpKind {
  TxBase,
  StorageWriteNewWord,
  StorageWriteUpdateWord,
  StorageReadWord,
  HashBase,
  HashPerWord,
  MemoryWord,
  ArithmeticOp,
  ComparisonOp,
};

inline constexpr std::array<OpKind, 9> kAllOpKinds = {
    OpKind::TxBase,       OpKind::StorageWriteNewWord, OpKind::StorageWriteUpdateWord,
    OpKind::StorageReadWord, OpKind::HashBase,          OpKind::HashPerWord,
    OpKind::MemoryWord,   OpKind::ArithmeticOp,        OpKind::ComparisonOp,
};

/// Config-file key, e.g. "storage_write_new_word".
std::string_view to_string(OpKind kind);
OpKind parse_op_kind(std::string_view name);

/// Gas per unit of each operation kind. Defaults are Frontier/Homestead-era
/// EVM prices (SSTORE 20000/5000, SLOAD 200, SHA3 30 + 6 per word, memory and
/// ALU ops 3).
struct GasTable {
  std::uint64_t tx_base = 21000;
  std::uint64_t storage_write_new_word = 20000;
  std::uint64_t storage_write_update_word = 5000;
  std::uint64_t storage_read_word = 200;
  std::uint64_t hash_base = 30;
  std::uint64_t hash_per_word = 6;
  std::uint64_t memory_word = 3;
  std::uint64_t arithmetic_op = 3;
  std::uint64_t comparison_op = 3;

  std::uint64_t cost(OpKind kind) const;
  std::uint64_t& entry(OpKind kind);

  /// Throws InvalidGasTable unless every entry is positive and
  /// new-word write > update write > storage read > memory word.
  void validate() const;

  /// Starts from the defaults and overrides the keys present in `text`.
  static GasTable parse(std::string_view text);
  static GasTable load(const std::filesystem::path& path);
  std::string to_config() const;

  friend bool operator==(const GasTable&, const GasTable&) = default;
};

/// Operation tallies for the simulated contract's compute pattern.
struct OpCounts {
  std::uint64_t storage_reads = 0;
  std::uint64_t storage_updates = 0;
  std::uint64_t memory_words = 0;
  std::uint64_t arithmetic = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t hashes = 0;
  std::uint64_t hash_words = 0;

  OpCounts& operator+=(const OpCounts& other);
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

std::uint64_t gas_of(const OpCounts& counts, const GasTable& table);

struct GasEntry {
  Phase phase = Phase::Posting;
  std::string party;
  OpKind kind = OpKind::TxBase;
  std::uint64_t words = 0;
  std::uint64_t gas = 0;

  friend bool operator==(const GasEntry&, const GasEntry&) = default;
};

struct GasLedger {
  std::map<Phase, std::uint64_t> per_phase;
  std::map<AgentId, std::uint64_t> per_agent;
  std::uint64_t requester = 0;
  std::uint64_t total = 0;
  std::vector<GasEntry> entries;

  /// Adds table[kind] * words. An empty `agent` attributes to the requester.
  std::uint64_t charge(Phase phase, const std::optional<AgentId>& agent, OpKind kind,
                       std::uint64_t words, const GasTable& table);
  std::uint64_t charge(Phase phase, const std::optional<AgentId>& agent, std::string_view kind,
                       std::uint64_t words, const GasTable& table);

  /// Charges every nonzero tally in `counts` as its own entry.
  std::uint64_t charge_ops(Phase phase, const std::optional<AgentId>& agent, const OpCounts& counts,
                           const GasTable& table);

  std::uint64_t phase_total(Phase phase) const;
  std::uint64_t agent_total(const AgentId& agent) const;

  /// total == sum(per_phase) == sum(per_agent) + requester == sum(entries).
  bool consistent() const;

  friend bool operator==(const GasLedger&, const GasLedger&) = default;
};

/// Writing-cost model of a commit scheme: each commitment batch costs one
/// transaction, one new storage word and one single-word hash check. Packed
/// batches hold 42 answers, unpacked ones a single answer.
std::uint64_t cost_of_commit_scheme(std::size_t n_answers, bool packed, const GasTable& table);

enum class SamplingMethod { Rejection, FisherYatesPrefix };

/// Gas of drawing k of n peers that took `draws` generator draws: every draw
/// costs a hash and a modulo; Fisher-Yates also initialises and swaps the
/// candidate pool, rejection scans the already-selected list.
OpCounts sampling_ops(SamplingMethod method, std::size_t n, std::size_t k, std::uint64_t draws);
std::uint64_t cost_of_sampling(SamplingMethod method, std::size_t n, std::size_t k,
                               std::uint64_t draws, const GasTable& table);

/// Header `phase,party,op_kind,words,gas`, one row per entry.
void write_gas_report_csv(std::ostream& out, const GasLedger& ledger);

}  // namespace infochain
