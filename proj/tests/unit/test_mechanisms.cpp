#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "infochain/error.hpp"
#include "infochain/mechanisms.hpp"
#include "matrix_text.hpp"

using namespace infochain;
using infochain::testing::matrix_from_text;

namespace {

std::vector<Rational> rewards_of(const RewardReport& r) { return r.rewards; }

AnswerMatrix random_matrix(SplitMix64& rng, std::size_t max_agents, std::size_t max_questions) {
  const std::size_t agents = 2 + rng.next() % (max_agents - 1);
  const std::size_t questions = 1 + rng.next() % max_questions;
  const double density = 0.3 + 0.6 * rng.uniform();
  std::string text;
  for (std::size_t a = 0; a < agents; ++a) {
    if (a) text += '/';
    for (std::size_t q = 0; q < questions; ++q) {
      text += rng.uniform() < density ? ((rng.next() & 1) ? '1' : '0') : '-';
    }
  }
  return matrix_from_text(text);
}

}  // namespace

TEST(Mechanisms, OutputAgreementExamples) {
  EXPECT_EQ(rewards_of(oa_rewards(matrix_from_text("1/1"))), (std::vector<Rational>{1, 1}));
  EXPECT_EQ(rewards_of(oa_rewards(matrix_from_text("1/0"))), (std::vector<Rational>{0, 0}));
  EXPECT_EQ(rewards_of(oa_rewards(matrix_from_text("1/1/0"))),
            (std::vector<Rational>{Rational(1, 2), Rational(1, 2), 0}));
}

TEST(Mechanisms, DasguptaGhoshExamples) {
  // A and B share q0; A alone answers q1, B alone answers q2.
  EXPECT_EQ(rewards_of(dg_rewards(matrix_from_text("10-/1-1"))), (std::vector<Rational>{1, 1}));
  EXPECT_EQ(rewards_of(dg_rewards(matrix_from_text("11-/1-1"))), (std::vector<Rational>{0, 0}));
  try {
    dg_rewards(matrix_from_text("10/11"));
    FAIL() << "identical question sets accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoNonCommonQuestions);
    EXPECT_NE(std::string(e.what()).find("'a0' and 'a1'"), std::string::npos) << e.what();
  }
}

TEST(Mechanisms, PtscExamples) {
  // R_a0(1) = 2/4: a0 on q0 against a1 matches -> 2 - 1; against a2 misses -> -1.
  const auto r = ptsc_rewards(matrix_from_text("11/10/01"), Rational(1));
  EXPECT_EQ(r.rewards, (std::vector<Rational>{0, Rational(-2, 3), Rational(-2, 3)}));
  const auto consensus = ptsc_rewards(matrix_from_text("11/11/11"), Rational(3, 2));
  EXPECT_EQ(consensus.rewards, (std::vector<Rational>{0, 0, 0}));
  // R_i(y) = 0 -> the question contributes 0
  EXPECT_EQ(rewards_of(ptsc_rewards(matrix_from_text("1-/1-/0-"), Rational(1)))[2], Rational(0));
  EXPECT_THROW(ptsc_rewards(matrix_from_text("1/1"), Rational(0)), Error);
}

TEST(Mechanisms, EmptyMatrixAndSilentAgents) {
  try {
    oa_rewards(matrix_from_text("--/--"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyMatrix);
  }
  const auto r = oa_rewards(matrix_from_text("11/11/--"));
  ASSERT_EQ(r.agents.size(), 3u);
  EXPECT_EQ(r.rewards[2], Rational(0));
  EXPECT_EQ(r.scored_questions[2], 0u);
  EXPECT_THROW(r.reward("nobody"), Error);
  EXPECT_EQ(r.reward("a0"), Rational(1));
}

TEST(Mechanisms, GoldenOracleCases) {
  std::ifstream in(INFOCHAIN_GOLDEN_DIR "/mechanism_cases.txt");
  ASSERT_TRUE(in);
  std::string line;
  int checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string mech, alpha_text, peers, matrix_text, colon;
    fields >> mech >> alpha_text >> peers >> matrix_text >> colon;
    std::vector<std::string> expected;
    for (std::string tok; fields >> tok;) expected.push_back(tok);

    PeerMode mode = PeerMode::all_peers();
    if (peers != "all") {
      std::replace(peers.begin(), peers.end(), '@', ' ');
      std::istringstream p(peers);
      std::size_t k = 0;
      SelectionSeed seed;
      p >> k >> seed.block_timestamp >> seed.difficulty;
      mode = PeerMode::sampled(k, seed);
    }
    const AnswerMatrix m = matrix_from_text(matrix_text);
    const Mechanism mechanism = parse_mechanism(mech);
    const Rational alpha = parse_rational(alpha_text);

    for (bool naive : {false, true}) {
      SCOPED_TRACE(line + (naive ? " [naive]" : " [optimized]"));
      try {
        const auto r = naive ? rewards_naive(m, mechanism, alpha, mode) : compute_rewards(m, mechanism, alpha, mode);
        std::vector<std::string> got;
        for (const auto& v : r.rewards) got.push_back(to_fraction(v));
        EXPECT_EQ(got, expected);
      } catch (const Error& e) {
        ASSERT_EQ(expected.size(), 1u) << e.what();
        EXPECT_EQ("error:" + std::string(to_string(e.code())), expected.front());
      }
    }
    ++checked;
  }
  EXPECT_GE(checked, 600);
}

TEST(Mechanisms, OptimizedEqualsNaiveOnRandomMatrices) {
  SplitMix64 rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    const AnswerMatrix m = random_matrix(rng, 10, 10);
    if (m.answer_count() == 0) continue;
    for (Mechanism mech : {Mechanism::OutputAgreement, Mechanism::DasguptaGhosh, Mechanism::Ptsc}) {
      const PeerMode mode =
          (trial % 3 == 0) ? PeerMode::sampled(1 + trial % 4, SelectionSeed{static_cast<std::uint64_t>(trial), 5})
                           : PeerMode::all_peers();
      std::optional<RewardReport> fast, slow;
      std::optional<Errc> fast_err, slow_err;
      try {
        fast = compute_rewards(m, mech, Rational(3, 2), mode);
      } catch (const Error& e) {
        fast_err = e.code();
      }
      try {
        slow = rewards_naive(m, mech, Rational(3, 2), mode);
      } catch (const Error& e) {
        slow_err = e.code();
      }
      ASSERT_EQ(fast_err, slow_err);
      if (fast) {
        ASSERT_EQ(fast->rewards, slow->rewards);
        ASSERT_EQ(fast->scored_questions, slow->scored_questions);
      }
    }
    ++compared;
  }
  EXPECT_GE(compared, 1000);
}

TEST(Mechanisms, NaivePathCostsMoreOperations) {
  SplitMix64 rng(8);
  std::uint64_t fast_total = 0, slow_total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const AnswerMatrix m = random_matrix(rng, 10, 10);
    if (m.answer_count() < 10) continue;
    for (Mechanism mech : {Mechanism::OutputAgreement, Mechanism::Ptsc}) {
      OpCounts fast, slow;
      compute_rewards(m, mech, Rational(1), PeerMode::all_peers(), &fast);
      rewards_naive(m, mech, Rational(1), PeerMode::all_peers(), &slow);
      // Tiny matrices can tie: with at most one peer per question there is nothing to reuse.
      EXPECT_GE(gas_of(slow, GasTable{}), gas_of(fast, GasTable{}));
      fast_total += gas_of(fast, GasTable{});
      slow_total += gas_of(slow, GasTable{});
    }
  }
  EXPECT_GT(slow_total, 2 * fast_total);
}

TEST(Mechanisms, RewardRanges) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const AnswerMatrix m = random_matrix(rng, 8, 8);
    if (m.answer_count() == 0) continue;
    for (const auto& r : oa_rewards(m).rewards) {
      EXPECT_GE(r, 0);
      EXPECT_LE(r, 1);
    }
    const Rational alpha(5, 4);
    for (const auto& r : ptsc_rewards(m, alpha).rewards) EXPECT_GE(r, -alpha);
    try {
      for (const auto& r : dg_rewards(m).rewards) {
        EXPECT_GE(r, -1);
        EXPECT_LE(r, 1);
      }
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::NoNonCommonQuestions);
    }
  }
}

TEST(Mechanisms, FullAgreementPaysOneUnderOutputAgreement) {
  const auto r = oa_rewards(matrix_from_text("101/101/101/101"));
  for (const auto& v : r.rewards) EXPECT_EQ(v, Rational(1));
}

TEST(Mechanisms, PtscIsLinearInAlpha) {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const AnswerMatrix m = random_matrix(rng, 8, 8);
    if (m.answer_count() == 0) continue;
    const auto one = ptsc_rewards(m, Rational(1)).rewards;
    const auto scaled = ptsc_rewards(m, Rational(7, 3)).rewards;
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(scaled[i], one[i] * Rational(7, 3));
  }
}

TEST(Mechanisms, LabelInvariance) {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const AnswerMatrix m = random_matrix(rng, 7, 7);
    if (m.answer_count() == 0) continue;
    // reverse agent and question order
    std::vector<AgentId> agents(m.agents().rbegin(), m.agents().rend());
    std::vector<QuestionId> questions(m.questions().rbegin(), m.questions().rend());
    AnswerMatrix p(agents, questions);
    for (std::size_t a = 0; a < m.agent_count(); ++a) {
      for (std::size_t q : m.questions_of(a)) p.set(m.agents()[a], m.questions()[q], m.value(a, q));
    }
    for (Mechanism mech : {Mechanism::OutputAgreement, Mechanism::Ptsc}) {
      const auto r1 = compute_rewards(m, mech, Rational(1));
      const auto r2 = compute_rewards(p, mech, Rational(1));
      for (const auto& id : m.agents()) EXPECT_EQ(r1.reward(id), r2.reward(id));
    }
  }
}

TEST(Mechanisms, FrequencyTableExcludesOwnAnswers) {
  const AnswerMatrix m = matrix_from_text("11/10/01");
  const FrequencyTable t(m);
  EXPECT_EQ(t.global().ones, 4u);
  EXPECT_EQ(t.global().zeros, 2u);
  AnswerCounts sum;
  for (const auto& c : t.per_agent()) {
    sum.ones += c.ones;
    sum.zeros += c.zeros;
  }
  EXPECT_EQ(sum, t.global());
  EXPECT_EQ(t.relative_frequency(0, true), Rational(1, 2));
  EXPECT_EQ(t.relative_frequency(1, true), Rational(3, 4));
  EXPECT_EQ(t.relative_frequency(1, false), Rational(1, 4));
  const FrequencyTable lonely(matrix_from_text("1/-"));
  EXPECT_FALSE(lonely.relative_frequency(0, true).has_value());
}

TEST(Mechanisms, SampledModeWithAllPeersMatchesAllPeers) {
  // k at least the number of peers selects everyone, so only the order differs
  const AnswerMatrix m = matrix_from_text("1101/1-01/0110/11-0");
  for (Mechanism mech : {Mechanism::OutputAgreement, Mechanism::Ptsc}) {
    EXPECT_EQ(compute_rewards(m, mech, Rational(1), PeerMode::sampled(10, SelectionSeed{1, 1})).rewards,
              compute_rewards(m, mech, Rational(1)).rewards);
  }
  EXPECT_THROW(PeerMode::sampled(0, SelectionSeed{}), Error);
}

TEST(Mechanisms, SampledRewardsAreUnbiased) {
  const AnswerMatrix m = matrix_from_text("1101-/1-011/01101/11-01/0-110");
  constexpr int kSeeds = 4000;
  for (Mechanism mech : {Mechanism::OutputAgreement, Mechanism::Ptsc}) {
    const auto exact = compute_rewards(m, mech, Rational(1)).rewards;
    std::vector<double> sum(exact.size(), 0), sum_sq(exact.size(), 0);
    for (int s = 0; s < kSeeds; ++s) {
      const auto r = compute_rewards(m, mech, Rational(1), PeerMode::sampled(1, SelectionSeed{static_cast<std::uint64_t>(s), 3}));
      for (std::size_t i = 0; i < r.rewards.size(); ++i) {
        const double v = to_double(r.rewards[i]);
        sum[i] += v;
        sum_sq[i] += v * v;
      }
    }
    for (std::size_t i = 0; i < exact.size(); ++i) {
      const double mean = sum[i] / kSeeds;
      const double var = sum_sq[i] / kSeeds - mean * mean;
      const double se = std::sqrt(std::max(var, 0.0) / kSeeds);
      EXPECT_NEAR(mean, to_double(exact[i]), 3 * se + 1e-12) << to_string(mech) << " agent " << i;
    }
  }
}
