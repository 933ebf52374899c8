#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "infochain/answer_matrix.hpp"
#include "infochain/commitment.hpp"
#include "infochain/event_log.hpp"
#include "infochain/gas_model.hpp"
#include "infochain/mechanisms.hpp"
#include "infochain/rational.hpp"
#include "infochain/types.hpp"

namespace infochain {

enum class RewardPath { Optimized, Naive };

struct LedgerConfig {
  Mechanism mechanism = Mechanism::OutputAgreement;
  Rational alpha{1};
  /// Sampled peers per (agent, question); empty means all peers.
  std::optional<std::size_t> sample_k;
  RewardPath reward_path = RewardPath::Optimized;
  /// 42 answers per commitment when packed, one otherwise.
  bool packing = true;
  std::uint64_t commit_blocks = 16;
  std::uint64_t reveal_blocks = 16;
  /// Mining difficulty fed into the peer-selection seed.
  std::uint64_t difficulty = 1;
  /// Currency units per gas unit for reimbursements.
  Units gas_price = 1;
  GasTable gas;

  /// 0 for OA, one mechanism unit for DG, ceil(alpha) units for PTSC.
  Units minimum_deposit() const;
  std::size_t batch_capacity() const { return packing ? kMaxAnswersPerCommitment : 1; }

  friend bool operator==(const LedgerConfig&, const LedgerConfig&) = default;
};

struct CommitRecord {
  AgentId agent;
  std::size_t batch = 0;
  Commitment commitment;
  std::uint64_t submitted_at = 0;

  friend bool operator==(const CommitRecord&, const CommitRecord&) = default;
};

struct AcceptedReveal {
  PackedAnswerVector answers;
  SecretKey key;

  friend bool operator==(const AcceptedReveal&, const AcceptedReveal&) = default;
};

struct SettlementRow {
  AgentId agent;
  Rational mechanism_reward;
  Units payment = 0;
  Units penalty = 0;
  Units deposit_returned = 0;
  Units gas_reimbursed = 0;
  bool penalty_clamped = false;

  friend bool operator==(const SettlementRow&, const SettlementRow&) = default;
};

struct SettlementReport {
  RewardReport rewards;
  std::vector<SettlementRow> rows;
  Units budget = 0;
  Units requester_deposit = 0;
  Units requester_refund = 0;
  /// DepositExhausted clamps and reimbursement shortfalls.
  std::vector<std::string> audit_log;

  Units total_payments() const;
  Units total_penalties() const;
  Units total_reimbursed() const;
  Units total_agent_deposits() const;

  friend bool operator==(const SettlementReport&, const SettlementReport&) = default;
};

/// Turns mechanism rewards into integer transfers.
///  - The budget is split in proportion to max(reward, 0), rounded down.
///  - A negative reward costs floor(|reward| * kUnitScale) units of deposit,
///    clamped at the deposit (logged as DepositExhausted).
///  - Reimbursement claims are paid from the requester deposit in agent order
///    until it runs out.
///  - Whatever is left of budget, requester deposit and penalties goes back
///    to the requester.
SettlementReport settle_rewards(const RewardReport& rewards, const std::map<AgentId, Units>& deposits,
                                Units budget, Units requester_deposit,
                                const std::map<AgentId, Units>& reimbursement_claims);

struct LedgerState {
  Phase phase = Phase::Posting;
  std::uint64_t block = 0;

  std::vector<QuestionId> questions;
  Units budget = 0;
  Units requester_deposit = 0;

  /// Registration order.
  std::vector<AgentId> agents;
  std::map<AgentId, std::vector<QuestionId>> selections;
  std::map<AgentId, Units> agent_deposits;

  std::map<AgentId, std::vector<CommitRecord>> commitments;
  std::map<std::pair<AgentId, std::size_t>, AcceptedReveal> accepted;
  std::set<std::pair<AgentId, std::size_t>> discarded;
  AnswerMatrix revealed;

  std::uint64_t commit_deadline = 0;
  std::uint64_t reveal_deadline = 0;
  bool reveal_closed = false;

  GasLedger gas;
  /// Net signed transfer per party after settlement ("requester" included).
  std::map<std::string, Units> transfers;
  std::optional<SettlementReport> settlement;

  Units escrow() const;

  friend bool operator==(const LedgerState&, const LedgerState&) = default;
};

/// Single-writer simulation of the oracle contract. Every successful call is
/// appended to the event log; failed calls leave state and log untouched.
///
/// Gas charged per call:
///   post_questions     requester  tx + new word per question + 2 (budget, deposit)
///   select_questions   agent      tx + new word per question + 1 (deposit)
///   close_selection    requester  tx
///   submit_commitment  agent      tx + one new word
///   reveal             agent      tx + storage read + single-word hash + comparison
///                                 (+ one new word for the answers when accepted)
///   settle             requester  tx + mechanism compute ops + one balance
///                                 update per agent and for the requester
class Ledger {
 public:
  explicit Ledger(LedgerConfig config);

  /// Rebuilds a ledger from its event log; the result has the same log and state.
  static Ledger replay(const std::vector<Event>& events);

  void post_questions(std::vector<QuestionId> questions, Units budget, Units requester_deposit);
  void select_questions(const AgentId& agent, std::vector<QuestionId> questions, Units deposit);
  /// Ends selection and opens the commit phase for commit_blocks blocks.
  void close_selection();
  void submit_commitment(const AgentId& agent, std::size_t batch, const Commitment& commitment);
  /// Returns true when the reveal matched its commitment and was recorded;
  /// a mismatching reveal is discarded without error.
  bool reveal(const AgentId& agent, std::size_t batch, const PackedAnswerVector& answers,
              const SecretKey& key);
  /// Moves the logical clock forward, closing phases whose deadline passed.
  void advance_blocks(std::uint64_t blocks);
  const SettlementReport& settle();

  const LedgerState& state() const { return state_; }
  const LedgerConfig& config() const { return config_; }
  const std::vector<Event>& events() const { return events_; }

  std::size_t batch_count(const AgentId& agent) const;
  std::vector<QuestionId> batch_questions(const AgentId& agent, std::size_t batch) const;
  bool reveal_complete() const;

 private:
  void log(EventType type, const std::string& party, Bytes payload);
  void require_phase(Phase phase, std::string_view action) const;
  void enter_reveal();
  bool all_committed() const;

  LedgerConfig config_;
  LedgerState state_;
  std::vector<Event> events_;
};

/// Invariant violations: unverifiable revealed answers, gas ledger drift,
/// and, once settled, any break in conservation of funds. Empty when sound.
std::vector<std::string> audit(const LedgerState& state);

/// Header `agent,mechanism_reward,payment_units,deposit_returned,gas_reimbursed`.
void write_settlement_csv(std::ostream& out, const SettlementReport& report);

Bytes encode_config(const LedgerConfig& config);
LedgerConfig decode_config(std::span<const std::uint8_t> payload);

}  // namespace infochain
