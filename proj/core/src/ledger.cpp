#include "infochain/ledger.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "infochain/error.hpp"

namespace infochain {

Units LedgerConfig::minimum_deposit() const {
  switch (mechanism) {
    case Mechanism::OutputAgreement: return 0;
    case Mechanism::DasguptaGhosh: return kUnitScale;
    case Mechanism::Ptsc: return ceil_to_int64(alpha * kUnitScale);
  }
  return 0;
}

Units SettlementReport::total_payments() const {
  return std::accumulate(rows.begin(), rows.end(), Units{0}, [](Units s, const auto& r) { return s + r.payment; });
}

Units SettlementReport::total_penalties() const {
  return std::accumulate(rows.begin(), rows.end(), Units{0}, [](Units s, const auto& r) { return s + r.penalty; });
}

Units SettlementReport::total_reimbursed() const {
  return std::accumulate(rows.begin(), rows.end(), Units{0},
                         [](Units s, const auto& r) { return s + r.gas_reimbursed; });
}

Units SettlementReport::total_agent_deposits() const {
  return std::accumulate(rows.begin(), rows.end(), Units{0},
                         [](Units s, const auto& r) { return s + r.deposit_returned + r.penalty; });
}

SettlementReport settle_rewards(const RewardReport& rewards, const std::map<AgentId, Units>& deposits,
                                Units budget, Units requester_deposit,
                                const std::map<AgentId, Units>& reimbursement_claims) {
  if (budget < 0 || requester_deposit < 0) throw Error(Errc::InvalidArgument, "negative escrow");
  SettlementReport report;
  report.rewards = rewards;
  report.budget = budget;
  report.requester_deposit = requester_deposit;

  Rational positive_total = 0;
  for (const auto& r : rewards.rewards) {
    if (r > 0) positive_total += r;
  }

  Units reimbursement_pool = requester_deposit;
  for (std::size_t i = 0; i < rewards.agents.size(); ++i) {
    const AgentId& agent = rewards.agents[i];
    const Rational& reward = rewards.rewards[i];
    auto dep = deposits.find(agent);
    const Units deposit = dep == deposits.end() ? 0 : dep->second;
    if (deposit < 0) throw Error(Errc::InvalidArgument, "negative deposit for '" + agent + "'");

    SettlementRow row;
    row.agent = agent;
    row.mechanism_reward = reward;
    if (reward > 0) {
      row.payment = floor_to_int64(Rational(budget) * reward / positive_total);
    } else if (reward < 0) {
      const Units owed = floor_to_int64(-reward * kUnitScale);
      row.penalty = std::min(owed, deposit);
      if (owed > deposit) {
        row.penalty_clamped = true;
        report.audit_log.push_back(fmt::format("DepositExhausted({}): penalty {} clamped to deposit {}",
                                               agent, owed, deposit));
      }
    }
    row.deposit_returned = deposit - row.penalty;

    if (auto claim = reimbursement_claims.find(agent); claim != reimbursement_claims.end()) {
      const Units paid = std::min(claim->second, reimbursement_pool);
      if (paid < claim->second) {
        report.audit_log.push_back(fmt::format("ReimbursementShortfall({}): claimed {}, paid {}", agent,
                                               claim->second, paid));
      }
      row.gas_reimbursed = paid;
      reimbursement_pool -= paid;
    }
    report.rows.push_back(std::move(row));
  }
  report.requester_refund =
      budget + requester_deposit - report.total_payments() - report.total_reimbursed() + report.total_penalties();
  return report;
}

Units LedgerState::escrow() const {
  Units total = budget + requester_deposit;
  for (const auto& [_, d] : agent_deposits) total += d;
  return total;
}

// ------------------------------------------------------------------ config codec

Bytes encode_config(const LedgerConfig& c) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(c.mechanism));
  w.str(to_fraction(c.alpha));
  w.u64(c.sample_k.value_or(0));
  w.u8(c.reward_path == RewardPath::Naive ? 1 : 0);
  w.u8(c.packing ? 1 : 0);
  w.u64(c.commit_blocks);
  w.u64(c.reveal_blocks);
  w.u64(c.difficulty);
  w.i64(c.gas_price);
  for (OpKind kind : kAllOpKinds) w.u64(c.gas.cost(kind));
  return w.take();
}

LedgerConfig decode_config(std::span<const std::uint8_t> payload) {
  ByteReader r(payload);
  LedgerConfig c;
  const auto mechanism = r.u8();
  if (mechanism > static_cast<std::uint8_t>(Mechanism::Ptsc)) throw Error(Errc::ParseError, "bad mechanism");
  c.mechanism = static_cast<Mechanism>(mechanism);
  c.alpha = parse_rational(r.str());
  if (const auto k = r.u64(); k != 0) c.sample_k = k;
  c.reward_path = r.u8() == 1 ? RewardPath::Naive : RewardPath::Optimized;
  c.packing = r.u8() == 1;
  c.commit_blocks = r.u64();
  c.reveal_blocks = r.u64();
  c.difficulty = r.u64();
  c.gas_price = r.i64();
  for (OpKind kind : kAllOpKinds) c.gas.entry(kind) = r.u64();
  r.expect_done();
  return c;
}

namespace {

void write_ids(ByteWriter& w, const std::vector<std::string>& ids) {
  w.u64(ids.size());
  for (const auto& id : ids) w.str(id);
}

std::vector<std::string> read_ids(ByteReader& r) {
  const auto n = r.u64();
  std::vector<std::string> ids;
  for (std::uint64_t i = 0; i < n; ++i) ids.push_back(r.str());
  return ids;
}

}  // namespace

// ------------------------------------------------------------------ ledger

Ledger::Ledger(LedgerConfig config) : config_(std::move(config)) {
  config_.gas.validate();
  if (config_.mechanism == Mechanism::Ptsc && config_.alpha <= 0) {
    throw Error(Errc::InvalidArgument, "PTSC scaling constant must be positive");
  }
  if (config_.sample_k && *config_.sample_k == 0) throw Error(Errc::InvalidArgument, "sample_k must be positive");
  if (config_.gas_price < 0) throw Error(Errc::InvalidArgument, "gas price must be nonnegative");
  log(EventType::Configure, std::string(kRequesterParty), encode_config(config_));
}

void Ledger::log(EventType type, const std::string& party, Bytes payload) {
  events_.push_back(Event{state_.block, type, party, std::move(payload)});
}

void Ledger::require_phase(Phase phase, std::string_view action) const {
  if (state_.phase != phase) {
    throw Error(Errc::WrongPhase, fmt::format("{} requires phase {}, ledger is in {}", action, to_string(phase),
                                              to_string(state_.phase)));
  }
}

void Ledger::post_questions(std::vector<QuestionId> questions, Units budget, Units requester_deposit) {
  require_phase(Phase::Posting, "post_questions");
  if (budget <= 0) throw Error(Errc::ZeroBudget, "budget must be positive");
  if (requester_deposit < 0) throw Error(Errc::InvalidArgument, "requester deposit must be nonnegative");
  if (questions.empty()) throw Error(Errc::InvalidArgument, "no questions posted");
  std::unordered_set<std::string_view> seen;
  for (const auto& q : questions) {
    if (!is_valid_identifier(q)) throw Error(Errc::InvalidIdentifier, "question id '" + q + "'");
    if (!seen.insert(q).second) throw Error(Errc::DuplicateIdentifier, "question id '" + q + "'");
  }

  ByteWriter w;
  write_ids(w, questions);
  w.i64(budget);
  w.i64(requester_deposit);

  state_.gas.charge(Phase::Posting, std::nullopt, OpKind::TxBase, 1, config_.gas);
  state_.gas.charge(Phase::Posting, std::nullopt, OpKind::StorageWriteNewWord, questions.size() + 2, config_.gas);
  state_.questions = std::move(questions);
  state_.budget = budget;
  state_.requester_deposit = requester_deposit;
  state_.phase = Phase::Selection;
  log(EventType::PostQuestions, std::string(kRequesterParty), w.take());
}

void Ledger::select_questions(const AgentId& agent, std::vector<QuestionId> questions, Units deposit) {
  require_phase(Phase::Selection, "select_questions");
  if (!is_valid_identifier(agent) || agent == kRequesterParty) {
    throw Error(Errc::InvalidIdentifier, "agent id '" + agent + "'");
  }
  if (state_.selections.contains(agent)) throw Error(Errc::DuplicateIdentifier, "agent '" + agent + "' already registered");
  if (questions.empty()) throw Error(Errc::InvalidArgument, "agent '" + agent + "' selected no questions");
  std::unordered_set<std::string_view> seen;
  for (const auto& q : questions) {
    if (std::find(state_.questions.begin(), state_.questions.end(), q) == state_.questions.end()) {
      throw Error(Errc::UnknownQuestion, "'" + q + "'");
    }
    if (!seen.insert(q).second) throw Error(Errc::DuplicateIdentifier, "question '" + q + "' selected twice");
  }
  const Units minimum = config_.minimum_deposit();
  if (deposit < minimum) {
    throw Error(Errc::InsufficientDeposit,
                fmt::format("agent '{}' deposited {} but {} requires {}", agent, deposit,
                            to_string(config_.mechanism), minimum));
  }

  ByteWriter w;
  write_ids(w, questions);
  w.i64(deposit);

  state_.gas.charge(Phase::Selection, agent, OpKind::TxBase, 1, config_.gas);
  state_.gas.charge(Phase::Selection, agent, OpKind::StorageWriteNewWord, questions.size() + 1, config_.gas);
  state_.agents.push_back(agent);
  state_.selections[agent] = std::move(questions);
  state_.agent_deposits[agent] = deposit;
  log(EventType::SelectQuestions, agent, w.take());
}

void Ledger::close_selection() {
  require_phase(Phase::Selection, "close_selection");
  if (state_.agents.empty()) throw Error(Errc::InvalidArgument, "no agents selected any question");
  state_.gas.charge(Phase::Selection, std::nullopt, OpKind::TxBase, 1, config_.gas);
  state_.revealed = AnswerMatrix(state_.agents, state_.questions);
  state_.phase = Phase::Commit;
  state_.commit_deadline = state_.block + config_.commit_blocks;
  log(EventType::CloseSelection, std::string(kRequesterParty), {});
}

std::size_t Ledger::batch_count(const AgentId& agent) const {
  auto it = state_.selections.find(agent);
  if (it == state_.selections.end()) throw Error(Errc::UnregisteredAgent, "'" + agent + "'");
  return infochain::batch_count(it->second.size(), config_.batch_capacity());
}

std::vector<QuestionId> Ledger::batch_questions(const AgentId& agent, std::size_t batch) const {
  const std::size_t batches = batch_count(agent);
  if (batch >= batches) {
    throw Error(Errc::InvalidArgument, fmt::format("agent '{}' has {} commitment batches", agent, batches));
  }
  const auto& selection = state_.selections.at(agent);
  const std::size_t cap = config_.batch_capacity();
  const auto first = selection.begin() + static_cast<std::ptrdiff_t>(batch * cap);
  const auto last = selection.begin() + static_cast<std::ptrdiff_t>(std::min(selection.size(), (batch + 1) * cap));
  return {first, last};
}

bool Ledger::all_committed() const {
  for (const auto& agent : state_.agents) {
    auto it = state_.commitments.find(agent);
    const std::size_t have = it == state_.commitments.end() ? 0 : it->second.size();
    if (have < batch_count(agent)) return false;
  }
  return true;
}

void Ledger::enter_reveal() {
  state_.phase = Phase::Reveal;
  state_.reveal_deadline = state_.block + config_.reveal_blocks;
}

void Ledger::submit_commitment(const AgentId& agent, std::size_t batch, const Commitment& commitment) {
  require_phase(Phase::Commit, "submit_commitment");
  if (!state_.selections.contains(agent)) throw Error(Errc::UnregisteredAgent, "'" + agent + "'");
  if (batch >= batch_count(agent)) {
    throw Error(Errc::InvalidArgument, fmt::format("agent '{}' has no commitment batch {}", agent, batch));
  }
  auto& records = state_.commitments[agent];
  if (std::any_of(records.begin(), records.end(), [&](const CommitRecord& r) { return r.batch == batch; })) {
    throw Error(Errc::DuplicateCommitment, fmt::format("agent '{}' batch {}", agent, batch));
  }

  ByteWriter w;
  w.u64(batch);
  w.bytes(commitment.digest);

  state_.gas.charge(Phase::Commit, agent, OpKind::TxBase, 1, config_.gas);
  state_.gas.charge(Phase::Commit, agent, OpKind::StorageWriteNewWord, 1, config_.gas);
  records.push_back(CommitRecord{agent, batch, commitment, state_.block});
  log(EventType::SubmitCommitment, agent, w.take());
  if (all_committed()) enter_reveal();
}

bool Ledger::reveal(const AgentId& agent, std::size_t batch, const PackedAnswerVector& answers,
                    const SecretKey& key) {
  require_phase(Phase::Reveal, "reveal");
  if (state_.reveal_closed) throw Error(Errc::WrongPhase, "reveal deadline has passed");
  if (!state_.selections.contains(agent)) throw Error(Errc::UnregisteredAgent, "'" + agent + "'");
  auto records = state_.commitments.find(agent);
  const CommitRecord* record = nullptr;
  if (records != state_.commitments.end()) {
    for (const auto& r : records->second) {
      if (r.batch == batch) record = &r;
    }
  }
  if (!record) throw Error(Errc::NoCommitment, fmt::format("agent '{}' batch {}", agent, batch));
  const auto key_pair = std::make_pair(agent, batch);
  if (state_.accepted.contains(key_pair) || state_.discarded.contains(key_pair)) {
    throw Error(Errc::AlreadyRevealed, fmt::format("agent '{}' batch {}", agent, batch));
  }

  const bool accepted = answers.question_order() == batch_questions(agent, batch) &&
                        verify_reveal(record->commitment, answers, key);

  ByteWriter w;
  w.u64(batch);
  write_ids(w, answers.question_order());
  w.bytes(answers.encode_message());
  w.bytes(key.bytes());

  state_.gas.charge(Phase::Reveal, agent, OpKind::TxBase, 1, config_.gas);
  state_.gas.charge(Phase::Reveal, agent, OpKind::StorageReadWord, 1, config_.gas);
  state_.gas.charge(Phase::Reveal, agent, OpKind::HashBase, 1, config_.gas);
  state_.gas.charge(Phase::Reveal, agent, OpKind::HashPerWord, 1, config_.gas);
  state_.gas.charge(Phase::Reveal, agent, OpKind::ComparisonOp, 1, config_.gas);
  if (accepted) {
    state_.gas.charge(Phase::Reveal, agent, OpKind::StorageWriteNewWord, 1, config_.gas);
    const std::size_t a = state_.revealed.require_agent(agent);
    for (const auto& [question, bit] : answers.answers()) {
      state_.revealed.set(a, state_.revealed.require_question(question), bit);
    }
    state_.accepted.emplace(key_pair, AcceptedReveal{answers, key});
  } else {
    state_.discarded.insert(key_pair);
  }
  log(EventType::Reveal, agent, w.take());
  return accepted;
}

bool Ledger::reveal_complete() const {
  if (state_.phase != Phase::Reveal) return false;
  if (state_.reveal_closed) return true;
  std::size_t committed = 0;
  for (const auto& [_, records] : state_.commitments) committed += records.size();
  return committed == state_.accepted.size() + state_.discarded.size();
}

void Ledger::advance_blocks(std::uint64_t blocks) {
  if (blocks == 0) throw Error(Errc::InvalidArgument, "advance_blocks needs a positive count");
  ByteWriter w;
  w.u64(blocks);
  log(EventType::AdvanceBlocks, std::string(kRequesterParty), w.take());
  state_.block += blocks;
  if (state_.phase == Phase::Commit && state_.block >= state_.commit_deadline) enter_reveal();
  if (state_.phase == Phase::Reveal && state_.block >= state_.reveal_deadline) state_.reveal_closed = true;
}

const SettlementReport& Ledger::settle() {
  if (state_.phase != Phase::Reveal || !reveal_complete()) {
    throw Error(Errc::WrongPhase,
                fmt::format("settle requires a completed reveal phase, ledger is in {}{}", to_string(state_.phase),
                            state_.phase == Phase::Reveal ? " with reveals outstanding" : ""));
  }

  PeerMode mode = PeerMode::all_peers();
  if (config_.sample_k) mode = PeerMode::sampled(*config_.sample_k, SelectionSeed{state_.block, config_.difficulty});

  OpCounts ops;
  RewardReport rewards;
  if (state_.revealed.answer_count() == 0) {
    // nothing revealed: every agent scores 0 and the budget returns
    rewards.mechanism = config_.mechanism;
    rewards.alpha = config_.mechanism == Mechanism::Ptsc ? config_.alpha : Rational(1);
    rewards.peer_mode = mode;
    rewards.agents = state_.agents;
    rewards.rewards.assign(state_.agents.size(), Rational(0));
    rewards.scored_questions.assign(state_.agents.size(), 0);
  } else if (config_.reward_path == RewardPath::Naive) {
    rewards = rewards_naive(state_.revealed, config_.mechanism, config_.alpha, mode, &ops);
  } else {
    rewards = compute_rewards(state_.revealed, config_.mechanism, config_.alpha, mode, &ops);
  }
  ops.storage_updates += state_.agents.size() + 1;

  std::map<AgentId, Units> claims;
  for (const auto& agent : state_.agents) {
    const bool revealed_any = std::any_of(state_.accepted.begin(), state_.accepted.end(),
                                          [&](const auto& entry) { return entry.first.first == agent; });
    if (revealed_any) claims[agent] = static_cast<Units>(state_.gas.agent_total(agent)) * config_.gas_price;
  }
  SettlementReport report =
      settle_rewards(rewards, state_.agent_deposits, state_.budget, state_.requester_deposit, claims);

  state_.gas.charge(Phase::Settled, std::nullopt, OpKind::TxBase, 1, config_.gas);
  state_.gas.charge_ops(Phase::Settled, std::nullopt, ops, config_.gas);

  state_.transfers.clear();
  for (const auto& row : report.rows) {
    state_.transfers[row.agent] = row.payment + row.gas_reimbursed - row.penalty;
  }
  state_.transfers[std::string(kRequesterParty)] =
      report.total_penalties() - report.total_payments() - report.total_reimbursed();
  state_.settlement = std::move(report);
  state_.phase = Phase::Settled;
  log(EventType::Settle, std::string(kRequesterParty), {});
  return *state_.settlement;
}

Ledger Ledger::replay(const std::vector<Event>& events) {
  if (events.empty() || events.front().type != EventType::Configure) {
    throw Error(Errc::ReplayMismatch, "event log must start with Configure");
  }
  Ledger ledger(decode_config(events.front().payload));
  for (std::size_t i = 1; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.block != ledger.state_.block) {
      throw Error(Errc::ReplayMismatch,
                  fmt::format("event {} at block {} but ledger is at block {}", i, e.block, ledger.state_.block));
    }
    ByteReader r(e.payload);
    switch (e.type) {
      case EventType::Configure:
        throw Error(Errc::ReplayMismatch, "Configure may only appear first");
      case EventType::PostQuestions: {
        auto questions = read_ids(r);
        const Units budget = r.i64();
        const Units deposit = r.i64();
        r.expect_done();
        ledger.post_questions(std::move(questions), budget, deposit);
        break;
      }
      case EventType::SelectQuestions: {
        auto questions = read_ids(r);
        const Units deposit = r.i64();
        r.expect_done();
        ledger.select_questions(e.party, std::move(questions), deposit);
        break;
      }
      case EventType::CloseSelection:
        r.expect_done();
        ledger.close_selection();
        break;
      case EventType::SubmitCommitment: {
        const auto batch = r.u64();
        const Bytes digest = r.bytes();
        r.expect_done();
        if (digest.size() != 32) throw Error(Errc::ParseError, "commitment digest must be 32 bytes");
        Commitment c;
        std::copy(digest.begin(), digest.end(), c.digest.begin());
        ledger.submit_commitment(e.party, batch, c);
        break;
      }
      case EventType::Reveal: {
        const auto batch = r.u64();
        auto order = read_ids(r);
        const Bytes message = r.bytes();
        const Bytes key_bytes = r.bytes();
        r.expect_done();
        if (key_bytes.size() != SecretKey::kBytes) throw Error(Errc::ParseError, "secret key must be 11 bytes");
        std::array<std::uint8_t, SecretKey::kBytes> key{};
        std::copy(key_bytes.begin(), key_bytes.end(), key.begin());
        ledger.reveal(e.party, batch, PackedAnswerVector::decode(message, std::move(order)),
                      SecretKey::from_bytes(key));
        break;
      }
      case EventType::AdvanceBlocks: {
        const auto blocks = r.u64();
        r.expect_done();
        ledger.advance_blocks(blocks);
        break;
      }
      case EventType::Settle:
        r.expect_done();
        ledger.settle();
        break;
    }
    if (!(ledger.events_.back() == e)) {
      throw Error(Errc::ReplayMismatch, fmt::format("event {} did not reproduce", i));
    }
  }
  return ledger;
}

std::vector<std::string> audit(const LedgerState& state) {
  std::vector<std::string> problems;
  if (!state.gas.consistent()) problems.push_back("gas ledger totals disagree");

  std::size_t accepted_answers = 0;
  for (const auto& [key, reveal] : state.accepted) {
    const auto& [agent, batch] = key;
    const CommitRecord* record = nullptr;
    if (auto it = state.commitments.find(agent); it != state.commitments.end()) {
      for (const auto& r : it->second) {
        if (r.batch == batch) record = &r;
      }
    }
    if (!record || !verify_reveal(record->commitment, reveal.answers, reveal.key)) {
      problems.push_back(fmt::format("reveal of '{}' batch {} lacks a matching commitment", agent, batch));
      continue;
    }
    const auto a = state.revealed.agent_index(agent);
    for (const auto& [question, bit] : reveal.answers.answers()) {
      const auto q = state.revealed.question_index(question);
      if (!a || !q || state.revealed.get(*a, *q) != std::optional<bool>(bit)) {
        problems.push_back(fmt::format("answer of '{}' on '{}' missing from matrix", agent, question));
      }
      ++accepted_answers;
    }
  }
  if (accepted_answers != state.revealed.answer_count()) {
    problems.push_back(fmt::format("matrix holds {} answers but only {} were verified",
                                   state.revealed.answer_count(), accepted_answers));
  }

  if (state.phase == Phase::Settled) {
    if (!state.settlement) {
      problems.push_back("settled ledger has no settlement report");
      return problems;
    }
    const SettlementReport& s = *state.settlement;
    Units paid_out = s.requester_refund;
    for (const auto& row : s.rows) {
      paid_out += row.payment + row.deposit_returned + row.gas_reimbursed;
      if (row.payment < 0 || row.penalty < 0 || row.deposit_returned < 0 || row.gas_reimbursed < 0) {
        problems.push_back("negative settlement amount for '" + row.agent + "'");
      }
      auto dep = state.agent_deposits.find(row.agent);
      if (dep == state.agent_deposits.end() || row.deposit_returned + row.penalty != dep->second) {
        problems.push_back("deposit of '" + row.agent + "' not fully accounted for");
      }
    }
    if (paid_out != state.escrow()) {
      problems.push_back(fmt::format("escrow {} but {} paid out", state.escrow(), paid_out));
    }
    if (s.total_payments() > state.budget) problems.push_back("payments exceed the budget");
    Units net = 0;
    for (const auto& [_, t] : state.transfers) net += t;
    if (net != 0) problems.push_back(fmt::format("transfers sum to {} instead of 0", net));
    if (s.requester_refund < 0) problems.push_back("requester refund is negative");
  }
  return problems;
}

void write_settlement_csv(std::ostream& out, const SettlementReport& report) {
  out << "agent,mechanism_reward,payment_units,deposit_returned,gas_reimbursed\n";
  for (const auto& row : report.rows) {
    out << row.agent << ',' << to_decimal(row.mechanism_reward) << ',' << row.payment << ','
        << row.deposit_returned << ',' << row.gas_reimbursed << '\n';
  }
}

}  // namespace infochain
