#include <sstream>

#include <gtest/gtest.h>

#include "infochain/error.hpp"
#include "infochain/ledger.hpp"
#include "matrix_text.hpp"
#include "round_driver.hpp"

using namespace infochain;
using infochain::testing::drive_round;
using infochain::testing::matrix_from_text;
using infochain::testing::RoundScript;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

LedgerConfig config_for(Mechanism m) {
  LedgerConfig c;
  c.mechanism = m;
  return c;
}

AnswerMatrix random_reports(SplitMix64& rng, std::size_t agents, std::size_t questions) {
  std::string text;
  for (std::size_t a = 0; a < agents; ++a) {
    if (a) text += '/';
    for (std::size_t q = 0; q < questions; ++q) text += rng.uniform() < 0.75 ? ((rng.next() & 1) ? '1' : '0') : '-';
  }
  return matrix_from_text(text);
}

void expect_conserved(const Ledger& ledger) {
  const auto problems = audit(ledger.state());
  for (const auto& p : problems) ADD_FAILURE() << p;
  Units net = 0;
  for (const auto& [_, t] : ledger.state().transfers) net += t;
  EXPECT_EQ(net, 0);
}

}  // namespace

TEST(Ledger, MinimumDeposits) {
  EXPECT_EQ(config_for(Mechanism::OutputAgreement).minimum_deposit(), 0);
  EXPECT_EQ(config_for(Mechanism::DasguptaGhosh).minimum_deposit(), kUnitScale);
  LedgerConfig ptsc = config_for(Mechanism::Ptsc);
  ptsc.alpha = Rational(3, 2);
  EXPECT_EQ(ptsc.minimum_deposit(), 3 * kUnitScale / 2);
  ptsc.alpha = Rational(1, 3);
  EXPECT_EQ(ptsc.minimum_deposit(), 333333334);
}

TEST(Ledger, FullRoundOutputAgreement) {
  const auto m = matrix_from_text("110/111/0-1");
  const Ledger ledger = drive_round(config_for(Mechanism::OutputAgreement), m);
  const auto& s = ledger.state();
  EXPECT_EQ(s.phase, Phase::Settled);
  EXPECT_EQ(s.revealed, m);
  ASSERT_TRUE(s.settlement);
  EXPECT_EQ(s.settlement->rewards.rewards, oa_rewards(m).rewards);
  EXPECT_LE(s.settlement->total_payments(), s.budget);
  expect_conserved(ledger);
  EXPECT_TRUE(s.gas.consistent());
  EXPECT_GT(s.gas.phase_total(Phase::Settled), 0u);
  for (const auto& row : s.settlement->rows) EXPECT_GT(row.gas_reimbursed, 0) << row.agent;
}

TEST(Ledger, PhaseOrderIsEnforced) {
  Ledger ledger(config_for(Mechanism::OutputAgreement));
  EXPECT_EQ(code_of([&] { ledger.select_questions("a", {"q"}, 0); }), Errc::WrongPhase);
  EXPECT_EQ(code_of([&] { ledger.close_selection(); }), Errc::WrongPhase);
  EXPECT_EQ(code_of([&] { ledger.settle(); }), Errc::WrongPhase);
  EXPECT_EQ(code_of([&] { ledger.post_questions({"q"}, 0, 0); }), Errc::ZeroBudget);
  ledger.post_questions({"q0", "q1"}, 100, 0);
  EXPECT_EQ(code_of([&] { ledger.post_questions({"q"}, 1, 0); }), Errc::WrongPhase);
  EXPECT_EQ(code_of([&] { ledger.select_questions("a", {"zz"}, 0); }), Errc::UnknownQuestion);
  ledger.select_questions("a", {"q0"}, 0);
  EXPECT_EQ(code_of([&] { ledger.submit_commitment("a", 0, Commitment{}); }), Errc::WrongPhase);
  ledger.close_selection();
  EXPECT_EQ(code_of([&] { ledger.select_questions("b", {"q0"}, 0); }), Errc::WrongPhase);
  EXPECT_EQ(code_of([&] { ledger.submit_commitment("b", 0, Commitment{}); }), Errc::UnregisteredAgent);
  EXPECT_EQ(code_of([&] { ledger.reveal("a", 0, PackedAnswerVector{}, SecretKey{}); }), Errc::WrongPhase);
}

TEST(Ledger, DepositsAreChecked) {
  Ledger dg(config_for(Mechanism::DasguptaGhosh));
  dg.post_questions({"q0"}, 100, 0);
  EXPECT_EQ(code_of([&] { dg.select_questions("a", {"q0"}, kUnitScale - 1); }), Errc::InsufficientDeposit);
  EXPECT_NO_THROW(dg.select_questions("a", {"q0"}, kUnitScale));
}

TEST(Ledger, CommitAndRevealErrors) {
  Ledger ledger(config_for(Mechanism::OutputAgreement));
  ledger.post_questions({"q0", "q1"}, 100, 0);
  ledger.select_questions("a", {"q0", "q1"}, 0);
  ledger.select_questions("b", {"q0"}, 0);
  ledger.close_selection();

  const auto va = PackedAnswerVector::pack(std::vector<std::pair<QuestionId, bool>>{{"q0", true}, {"q1", false}},
                                           {"q0", "q1"});
  SplitMix64 rng(4);
  const auto ka = SecretKey::from_generator(rng);
  ledger.submit_commitment("a", 0, commit(va, ka));
  EXPECT_EQ(code_of([&] { ledger.submit_commitment("a", 0, commit(va, ka)); }), Errc::DuplicateCommitment);
  EXPECT_EQ(code_of([&] { ledger.submit_commitment("a", 1, commit(va, ka)); }), Errc::InvalidArgument);
  EXPECT_EQ(ledger.state().phase, Phase::Commit);

  ledger.advance_blocks(ledger.config().commit_blocks);  // b never commits
  EXPECT_EQ(ledger.state().phase, Phase::Reveal);
  EXPECT_EQ(code_of([&] { ledger.reveal("b", 0, va, ka); }), Errc::NoCommitment);
  EXPECT_FALSE(ledger.reveal("a", 0, va.with_bit_flipped(3), ka));
  EXPECT_EQ(code_of([&] { ledger.reveal("a", 0, va, ka); }), Errc::AlreadyRevealed);
  EXPECT_EQ(ledger.state().revealed.answer_count(), 0u);
  EXPECT_TRUE(ledger.reveal_complete());
  ledger.settle();
  expect_conserved(ledger);
  EXPECT_EQ(ledger.state().settlement->total_payments(), 0);
  EXPECT_EQ(ledger.state().settlement->requester_refund, 100);
}

TEST(Ledger, RevealMustFollowBatchOrder) {
  Ledger ledger(config_for(Mechanism::OutputAgreement));
  ledger.post_questions({"q0", "q1"}, 100, 0);
  ledger.select_questions("a", {"q0", "q1"}, 0);
  ledger.close_selection();
  const std::vector<std::pair<QuestionId, bool>> answers{{"q0", true}, {"q1", false}};
  const auto swapped = PackedAnswerVector::pack(answers, {"q1", "q0"});
  const SecretKey key;
  ledger.submit_commitment("a", 0, commit(swapped, key));
  EXPECT_EQ(ledger.state().phase, Phase::Reveal);
  EXPECT_FALSE(ledger.reveal("a", 0, swapped, key));
  EXPECT_EQ(ledger.state().discarded.size(), 1u);
}

TEST(Ledger, UnpackedModeCommitsEveryAnswer) {
  LedgerConfig c = config_for(Mechanism::OutputAgreement);
  c.packing = false;
  const auto m = matrix_from_text("1101/1111/0101");
  const Ledger unpacked = drive_round(c, m);
  const Ledger packed = drive_round(config_for(Mechanism::OutputAgreement), m);
  EXPECT_EQ(unpacked.state().commitments.at("a0").size(), 4u);
  EXPECT_EQ(packed.state().commitments.at("a0").size(), 1u);
  EXPECT_GT(unpacked.state().gas.phase_total(Phase::Commit), packed.state().gas.phase_total(Phase::Commit));
  EXPECT_EQ(unpacked.state().settlement->rewards.rewards, packed.state().settlement->rewards.rewards);
}

TEST(Ledger, LargeSelectionSpansSeveralCommitments) {
  std::string row(90, '1');
  const auto m = matrix_from_text(row + "/" + row);
  const Ledger ledger = drive_round(config_for(Mechanism::OutputAgreement), m);
  EXPECT_EQ(ledger.state().commitments.at("a0").size(), 3u);
  EXPECT_EQ(ledger.state().revealed.answer_count(), 180u);
  expect_conserved(ledger);
}

TEST(Ledger, TamperedAndWithheldRevealsAreExcluded) {
  const auto m = matrix_from_text("110/111/011/101");
  RoundScript script;
  script.tamper = {1};
  script.withhold = {2};
  const Ledger ledger = drive_round(config_for(Mechanism::OutputAgreement), m, script);
  const auto& s = ledger.state();
  EXPECT_EQ(s.revealed.answer_count(), 6u);
  EXPECT_EQ(s.discarded.size(), 1u);
  const auto& rows = s.settlement->rows;
  EXPECT_EQ(rows[1].gas_reimbursed, 0);
  EXPECT_EQ(rows[2].gas_reimbursed, 0);
  EXPECT_GT(rows[0].gas_reimbursed, 0);
  expect_conserved(ledger);
}

TEST(Ledger, NegativeRewardsDrawOnDeposits) {
  LedgerConfig c = config_for(Mechanism::Ptsc);
  c.alpha = Rational(2);
  const Ledger ledger = drive_round(c, matrix_from_text("11/10/01"));
  const auto& report = *ledger.state().settlement;
  int negative = 0;
  for (const auto& row : report.rows) {
    if (row.mechanism_reward >= 0) continue;
    ++negative;
    EXPECT_EQ(row.penalty, floor_to_int64(-row.mechanism_reward * kUnitScale));
    EXPECT_EQ(row.deposit_returned, 2 * kUnitScale - row.penalty);
    EXPECT_EQ(row.payment, 0);
  }
  EXPECT_EQ(negative, 2);
  expect_conserved(ledger);
}

TEST(Ledger, ReplayReproducesStateAndLog) {
  LedgerConfig c = config_for(Mechanism::DasguptaGhosh);
  c.sample_k = 1;
  c.difficulty = 77;
  RoundScript script;
  script.tamper = {0};
  const auto m = matrix_from_text("11---/-01--/--11-/0--11");
  const Ledger original = drive_round(c, m, script);
  const Ledger replayed = Ledger::replay(original.events());
  EXPECT_EQ(replayed.events(), original.events());
  EXPECT_EQ(replayed.state(), original.state());
  EXPECT_EQ(replayed.config(), original.config());

  const auto text = format_event_log(original.events());
  EXPECT_EQ(Ledger::replay(parse_event_log(text)).state(), original.state());

  auto bad = original.events();
  bad[3].block += 1;
  EXPECT_EQ(code_of([&] { Ledger::replay(bad); }), Errc::ReplayMismatch);
  EXPECT_EQ(code_of([&] { Ledger::replay({}); }), Errc::ReplayMismatch);
}

TEST(Ledger, ConfigCodecRoundTrip) {
  LedgerConfig c;
  c.mechanism = Mechanism::Ptsc;
  c.alpha = Rational(7, 3);
  c.sample_k = 4;
  c.reward_path = RewardPath::Naive;
  c.packing = false;
  c.commit_blocks = 3;
  c.reveal_blocks = 9;
  c.difficulty = 123;
  c.gas_price = 2;
  c.gas.hash_base = 31;
  EXPECT_EQ(decode_config(encode_config(c)), c);
}

TEST(Settlement, ClampsPenaltyAtDeposit) {
  RewardReport r;
  r.agents = {"a", "b"};
  r.rewards = {Rational(1), Rational(-3)};
  const auto s = settle_rewards(r, {{"a", 0}, {"b", kUnitScale}}, 500, 0, {});
  EXPECT_TRUE(s.rows[1].penalty_clamped);
  EXPECT_EQ(s.rows[1].penalty, kUnitScale);
  EXPECT_EQ(s.rows[1].deposit_returned, 0);
  ASSERT_EQ(s.audit_log.size(), 1u);
  EXPECT_NE(s.audit_log[0].find("DepositExhausted"), std::string::npos);
  EXPECT_EQ(s.rows[0].payment, 500);
  EXPECT_EQ(s.requester_refund, kUnitScale);
}

TEST(Settlement, SplitsBudgetProportionallyAndCapsReimbursements) {
  RewardReport r;
  r.agents = {"a", "b", "c"};
  r.rewards = {Rational(1, 3), Rational(2, 3), Rational(0)};
  const auto s = settle_rewards(r, {}, 1000, 50, {{"a", 30}, {"b", 30}});
  EXPECT_EQ(s.rows[0].payment, 333);
  EXPECT_EQ(s.rows[1].payment, 666);
  EXPECT_EQ(s.rows[0].gas_reimbursed, 30);
  EXPECT_EQ(s.rows[1].gas_reimbursed, 20);
  EXPECT_EQ(s.requester_refund, 1000 + 50 - 999 - 50);
  EXPECT_EQ(s.audit_log.size(), 1u);
}

TEST(Settlement, CsvHeader) {
  const Ledger ledger = drive_round(config_for(Mechanism::OutputAgreement), matrix_from_text("1/1"));
  std::ostringstream out;
  write_settlement_csv(out, *ledger.state().settlement);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "agent,mechanism_reward,payment_units,deposit_returned,gas_reimbursed");
}

TEST(Ledger, ConservationOnRandomRounds) {
  SplitMix64 rng(77);
  int settled = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_reports(rng, 2 + rng.next() % 6, 1 + rng.next() % 8);
    if (m.answer_count() == 0) continue;
    LedgerConfig c;
    c.mechanism = static_cast<Mechanism>(trial % 3);
    c.alpha = Rational(1 + static_cast<int>(rng.next() % 4), 2);
    if (rng.next() % 3 == 0) c.sample_k = 1 + rng.next() % 3;
    c.packing = rng.next() % 2 == 0;
    RoundScript script;
    script.key_seed = static_cast<std::uint64_t>(trial);
    script.budget = 1 + static_cast<Units>(rng.next() % 5'000'000'000ULL);
    script.requester_deposit = static_cast<Units>(rng.next() % 2'000'000);
    if (rng.next() % 4 == 0) script.tamper = {0};
    try {
      const Ledger ledger = drive_round(c, m, script);
      expect_conserved(ledger);
      ++settled;
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), Errc::NoNonCommonQuestions) << e.what();
    }
  }
  EXPECT_GE(settled, 120);
}
