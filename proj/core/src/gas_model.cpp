#include "infochain/gas_model.hpp"

#include <numeric>

#include <fmt/format.h>

#include "infochain/commitment.hpp"
#include "infochain/config_file.hpp"
#include "infochain/error.hpp"

namespace infochain {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::TxBase: return "tx_base";
    case OpKind::StorageWriteNewWord: return "storage_write_new_word";
    case OpKind::StorageWriteUpdateWord: return "storage_write_update_word";
    case OpKind::StorageReadWord: return "storage_read_word";
    case OpKind::HashBase: return "hash_base";
    case OpKind::HashPerWord: return "hash_per_word";
    case OpKind::MemoryWord: return "memory_word";
    case OpKind::ArithmeticOp: return "arithmetic_op";
    case OpKind::ComparisonOp: return "comparison_op";
  }
  return "unknown";
}

OpKind parse_op_kind(std::string_view name) {
  for (OpKind kind : kAllOpKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(Errc::UnknownOpKind, "'" + std::string(name) + "'");
}

std::uint64_t GasTable::cost(OpKind kind) const { return const_cast<GasTable*>(this)->entry(kind); }

std::uint64_t& GasTable::entry(OpKind kind) {
  switch (kind) {
    case OpKind::TxBase: return tx_base;
    case OpKind::StorageWriteNewWord: return storage_write_new_word;
    case OpKind::StorageWriteUpdateWord: return storage_write_update_word;
    case OpKind::StorageReadWord: return storage_read_word;
    case OpKind::HashBase: return hash_base;
    case OpKind::HashPerWord: return hash_per_word;
    case OpKind::MemoryWord: return memory_word;
    case OpKind::ArithmeticOp: return arithmetic_op;
    case OpKind::ComparisonOp: return comparison_op;
  }
  throw Error(Errc::UnknownOpKind, "invalid enumerator");
}

void GasTable::validate() const {
  for (OpKind kind : kAllOpKinds) {
    if (cost(kind) == 0) throw Error(Errc::InvalidGasTable, fmt::format("{} must be positive", to_string(kind)));
  }
  if (!(storage_write_new_word > storage_write_update_word &&
        storage_write_update_word > storage_read_word && storage_read_word > memory_word)) {
    throw Error(Errc::InvalidGasTable,
                "expected storage_write_new_word > storage_write_update_word > storage_read_word > memory_word");
  }
}

GasTable GasTable::parse(std::string_view text) {
  GasTable table;
  for (const auto& [key, value] : parse_key_values(text)) {
    const OpKind kind = parse_op_kind(key);
    std::uint64_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoull(value, &used);
      if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, fmt::format("gas table entry {} = '{}' is not an unsigned integer", key, value));
    }
    table.entry(kind) = v;
  }
  table.validate();
  return table;
}

GasTable GasTable::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

std::string GasTable::to_config() const {
  std::string out;
  for (OpKind kind : kAllOpKinds) out += fmt::format("{} = {}\n", to_string(kind), cost(kind));
  return out;
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
  storage_reads += o.storage_reads;
  storage_updates += o.storage_updates;
  memory_words += o.memory_words;
  arithmetic += o.arithmetic;
  comparisons += o.comparisons;
  hashes += o.hashes;
  hash_words += o.hash_words;
  return *this;
}

namespace {

struct CountedKind {
  OpKind kind;
  std::uint64_t OpCounts::*field;
};

constexpr std::array<CountedKind, 7> kCountedKinds = {{
    {OpKind::StorageReadWord, &OpCounts::storage_reads},
    {OpKind::StorageWriteUpdateWord, &OpCounts::storage_updates},
    {OpKind::MemoryWord, &OpCounts::memory_words},
    {OpKind::ArithmeticOp, &OpCounts::arithmetic},
    {OpKind::ComparisonOp, &OpCounts::comparisons},
    {OpKind::HashBase, &OpCounts::hashes},
    {OpKind::HashPerWord, &OpCounts::hash_words},
}};

}  // namespace

std::uint64_t gas_of(const OpCounts& counts, const GasTable& table) {
  std::uint64_t gas = 0;
  for (const auto& c : kCountedKinds) gas += counts.*(c.field) * table.cost(c.kind);
  return gas;
}

std::uint64_t GasLedger::charge(Phase phase, const std::optional<AgentId>& agent, OpKind kind,
                                std::uint64_t words, const GasTable& table) {
  const std::uint64_t gas = table.cost(kind) * words;
  per_phase[phase] += gas;
  if (agent) {
    per_agent[*agent] += gas;
  } else {
    requester += gas;
  }
  total += gas;
  entries.push_back(GasEntry{phase, agent ? *agent : std::string(kRequesterParty), kind, words, gas});
  return gas;
}

std::uint64_t GasLedger::charge(Phase phase, const std::optional<AgentId>& agent, std::string_view kind,
                                std::uint64_t words, const GasTable& table) {
  return charge(phase, agent, parse_op_kind(kind), words, table);
}

std::uint64_t GasLedger::charge_ops(Phase phase, const std::optional<AgentId>& agent,
                                    const OpCounts& counts, const GasTable& table) {
  std::uint64_t gas = 0;
  for (const auto& c : kCountedKinds) {
    if (counts.*(c.field) != 0) gas += charge(phase, agent, c.kind, counts.*(c.field), table);
  }
  return gas;
}

std::uint64_t GasLedger::phase_total(Phase phase) const {
  auto it = per_phase.find(phase);
  return it == per_phase.end() ? 0 : it->second;
}

std::uint64_t GasLedger::agent_total(const AgentId& agent) const {
  auto it = per_agent.find(agent);
  return it == per_agent.end() ? 0 : it->second;
}

bool GasLedger::consistent() const {
  std::uint64_t phases = 0;
  for (const auto& [_, g] : per_phase) phases += g;
  std::uint64_t agents = 0;
  for (const auto& [_, g] : per_agent) agents += g;
  std::uint64_t listed = 0;
  for (const auto& e : entries) listed += e.gas;
  return phases == total && agents + requester == total && listed == total;
}

std::uint64_t cost_of_commit_scheme(std::size_t n_answers, bool packed, const GasTable& table) {
  if (n_answers == 0) throw Error(Errc::InvalidArgument, "commit scheme needs at least one answer");
  const std::size_t batches = packed ? batch_count(n_answers) : n_answers;
  const std::uint64_t per_batch =
      table.tx_base + table.storage_write_new_word + table.hash_base + table.hash_per_word;
  return batches * per_batch;
}

OpCounts sampling_ops(SamplingMethod method, std::size_t n, std::size_t k, std::uint64_t draws) {
  OpCounts ops;
  // one keccak over (seed, counter) per draw, then a modulo and an index step
  ops.hashes = draws;
  ops.hash_words = 2 * draws;
  ops.arithmetic = 2 * draws;
  if (method == SamplingMethod::FisherYatesPrefix) {
    ops.memory_words = n + 2 * k;
  } else {
    ops.comparisons = draws * k;
    ops.memory_words = k;
  }
  return ops;
}

std::uint64_t cost_of_sampling(SamplingMethod method, std::size_t n, std::size_t k,
                               std::uint64_t draws, const GasTable& table) {
  return gas_of(sampling_ops(method, n, k, draws), table);
}

void write_gas_report_csv(std::ostream& out, const GasLedger& ledger) {
  out << "phase,party,op_kind,words,gas\n";
  for (const auto& e : ledger.entries) {
    out << to_string(e.phase) << ',' << e.party << ',' << to_string(e.kind) << ',' << e.words << ','
        << e.gas << '\n';
  }
}

}  // namespace infochain
