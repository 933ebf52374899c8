// One PASS/FAIL line per criterion; exit status 1 if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "infochain/commitment.hpp"
#include "infochain/error.hpp"
#include "infochain/incentives.hpp"
#include "infochain/ledger.hpp"
#include "infochain/mechanisms.hpp"
#include "infochain/peer_selection.hpp"
#include "infochain/sim.hpp"
#include "matrix_text.hpp"
#include "round_driver.hpp"

using namespace infochain;

namespace {

// Tolerances and sizes.
constexpr int kRoundTripVectors = 10000;
constexpr int kTamperTrials = 10000;
constexpr int kEquivalenceMatrices = 1000;
constexpr int kUnbiasedSeeds = 10000;
constexpr double kSigmas = 3.0;
// Summation slack for grid points where payment equals alpha exactly.
constexpr double kRelativeFloatSlack = 1e-9;
constexpr int kBehaviorSeeds = 30;
constexpr std::uint64_t kEquilibriumRounds = 1'000'000;
constexpr std::uint64_t kGridRounds = 200'000;
constexpr int kLedgerRounds = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned worker_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

std::string num(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

struct MeanSe {
  double sum = 0, sum_sq = 0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double se() const {
    const double m = mean();
    const double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
};

std::vector<QuestionId> order_of(std::size_t n) {
  std::vector<QuestionId> order;
  for (std::size_t i = 0; i < n; ++i) order.push_back("q" + std::to_string(i));
  return order;
}

PackedAnswerVector random_vector(SplitMix64& rng, std::size_t width) {
  std::vector<std::pair<QuestionId, bool>> answers;
  auto order = order_of(width);
  for (const auto& q : order) {
    if (rng.next() % 4 != 0) answers.emplace_back(q, rng.next() & 1);
  }
  return PackedAnswerVector::pack(answers, std::move(order));
}

AnswerMatrix random_matrix(SplitMix64& rng, std::size_t agents, std::size_t questions) {
  std::string text;
  for (std::size_t a = 0; a < agents; ++a) {
    if (a) text += '/';
    for (std::size_t q = 0; q < questions; ++q) text += rng.uniform() < 0.7 ? ((rng.next() & 1) ? '1' : '0') : '-';
  }
  return testing::matrix_from_text(text);
}

Outcome capacity() {
  static_assert(kMessageBits == 256 / 3);
  static_assert(kMaxAnswersPerCommitment == kMessageBits / 2);
  bool rejected = false;
  try {
    std::vector<std::pair<QuestionId, bool>> answers;
    for (const auto& q : order_of(43)) answers.emplace_back(q, true);
    PackedAnswerVector::pack(answers, order_of(43));
  } catch (const Error& e) {
    rejected = e.code() == Errc::TooManyAnswers;
  }
  SplitMix64 rng(101);
  int ok = 0;
  for (int t = 0; t < kRoundTripVectors; ++t) {
    const auto v = random_vector(rng, 1 + rng.next() % kMaxAnswersPerCommitment);
    ok += PackedAnswerVector::decode(v.encode_message(), v.question_order()) == v;
  }
  return {rejected && ok == kRoundTripVectors && kMessageBits == 85 && kMaxAnswersPerCommitment == 42,
          "85/42 asserted, 43rd answer " + std::string(rejected ? "rejected" : "accepted") + ", round trips " +
              std::to_string(ok) + "/" + std::to_string(kRoundTripVectors)};
}

Outcome integrity() {
  SplitMix64 rng(202);
  int honest = 0, rejected = 0;
  for (int t = 0; t < kTamperTrials; ++t) {
    const auto v = random_vector(rng, 1 + rng.next() % kMaxAnswersPerCommitment);
    const auto key = SecretKey::from_generator(rng);
    const auto c = commit(v, key);
    honest += verify_reveal(c, v, key);
    const std::size_t answer_bits = 2 * v.slots().size();
    const std::size_t bit = rng.next() % (answer_bits + kKeyBits);
    const bool accepted = bit < answer_bits ? verify_reveal(c, v.with_bit_flipped(bit), key)
                                            : verify_reveal(c, v, key.with_bit_flipped(bit - answer_bits));
    rejected += !accepted;
  }
  return {honest == kTamperTrials && rejected == kTamperTrials,
          "honest accepted " + std::to_string(honest) + "/" + std::to_string(kTamperTrials) + ", tampered rejected " +
              std::to_string(rejected) + "/" + std::to_string(kTamperTrials)};
}

Outcome equivalence() {
  SplitMix64 rng(303);
  int agree = 0, compared = 0, errors = 0;
  for (int t = 0; t < kEquivalenceMatrices; ++t) {
    const auto m = random_matrix(rng, 2 + rng.next() % 9, 1 + rng.next() % 10);
    const auto mech = static_cast<Mechanism>(t % 3);
    const Rational alpha(1 + static_cast<int>(rng.next() % 5), 1 + static_cast<int>(rng.next() % 3));
    const PeerMode mode = t % 4 == 3 ? PeerMode::sampled(1 + rng.next() % 3, SelectionSeed{rng.next(), rng.next()})
                                     : PeerMode::all_peers();
    ++compared;
    std::optional<Errc> fast_error, slow_error;
    RewardReport fast, slow;
    try {
      fast = compute_rewards(m, mech, alpha, mode);
    } catch (const Error& e) {
      fast_error = e.code();
    }
    try {
      slow = rewards_naive(m, mech, alpha, mode);
    } catch (const Error& e) {
      slow_error = e.code();
    }
    if (fast_error || slow_error) {
      ++errors;
      agree += fast_error == slow_error;
    } else {
      agree += fast == slow;
    }
  }
  return {agree == compared && compared - errors >= kEquivalenceMatrices / 2,
          std::to_string(agree) + "/" + std::to_string(compared) + " matrices agree exactly (" +
              std::to_string(errors) + " raise the same error on both paths)"};
}

Outcome unbiased() {
  const AnswerMatrix m = testing::matrix_from_text("110--/-011-/--101/1--01/01--1");
  int checked = 0, within = 0;
  double worst = 0;
  for (Mechanism mech : {Mechanism::OutputAgreement, Mechanism::DasguptaGhosh, Mechanism::Ptsc}) {
    const auto exact = compute_rewards(m, mech, Rational(1)).rewards;
    std::vector<MeanSe> stats(exact.size());
    for (int s = 0; s < kUnbiasedSeeds; ++s) {
      const auto r = compute_rewards(m, mech, Rational(1),
                                     PeerMode::sampled(1, SelectionSeed{static_cast<std::uint64_t>(s), 17}));
      for (std::size_t i = 0; i < exact.size(); ++i) stats[i].add(to_double(r.rewards[i]));
    }
    for (std::size_t i = 0; i < exact.size(); ++i) {
      const double gap = std::abs(stats[i].mean() - to_double(exact[i]));
      const double se = stats[i].se();
      ++checked;
      within += gap <= kSigmas * se + 1e-12;
      if (se > 0) worst = std::max(worst, gap / se);
    }
  }
  return {within == checked, std::to_string(within) + "/" + std::to_string(checked) + " agent means within 3 SE over " +
                                 std::to_string(kUnbiasedSeeds) + " seeds (worst " + num(worst, 3) + " SE)"};
}

ExperimentConfig desk(Mechanism m) {
  ExperimentConfig c;
  c.mechanism = m;
  c.agents = 50;
  c.questions = 50;
  c.seed = 1;
  return c;
}

Outcome packing_steps(const QoSDataset& data) {
  const std::size_t max_q = 44;
  const auto runs = sweep_packing(data, desk(Mechanism::OutputAgreement), max_q);
  auto packed = [&](std::size_t q) { return runs[q - 1].writing_gas_per_agent(); };
  auto unpacked = [&](std::size_t q) { return runs[max_q + q - 1].writing_gas_per_agent(); };
  std::vector<std::size_t> steps;
  for (std::size_t q = 2; q <= max_q; ++q) {
    if (packed(q) != packed(q - 1)) steps.push_back(q);
  }
  bool increasing = true;
  for (std::size_t q = 2; q <= max_q; ++q) increasing = increasing && unpacked(q) > unpacked(q - 1);
  const bool pass = steps == std::vector<std::size_t>{43} && packed(43) > packed(42) && increasing;
  std::string where;
  for (auto s : steps) where += (where.empty() ? "" : ",") + std::to_string(s);
  return {pass, "packed " + num(packed(1), 9) + " for 1-42, " + num(packed(43), 9) + " at 43 (steps at " +
                    (where.empty() ? "none" : where) + "); unpacked " + num(unpacked(1), 9) + " -> " +
                    num(unpacked(max_q), 9) + (increasing ? " strictly increasing" : " NOT increasing")};
}

Outcome mechanism_ordering(const QoSDataset& data) {
  const auto runs = sweep_mechanisms(data, desk(Mechanism::OutputAgreement));
  std::map<Mechanism, std::uint64_t> gas;
  for (const auto& r : runs) gas[r.config.mechanism] = r.phase_gas(Phase::Settled);
  const auto oa = gas[Mechanism::OutputAgreement], dg = gas[Mechanism::DasguptaGhosh], ptsc = gas[Mechanism::Ptsc];
  return {dg > ptsc && dg > oa, "settlement gas OA " + std::to_string(oa) + ", DG " + std::to_string(dg) + ", PTSC " +
                                    std::to_string(ptsc)};
}

Outcome peer_sampling(const QoSDataset& data) {
  const std::size_t max_k = 49;
  const auto runs = sweep_peers(data, desk(Mechanism::DasguptaGhosh), max_k);
  const auto all = runs[0].phase_gas(Phase::Settled);
  const auto k1 = runs[1].phase_gas(Phase::Settled);
  std::optional<std::size_t> crossover;
  for (std::size_t k = 1; k <= max_k && !crossover; ++k) {
    if (runs[k].phase_gas(Phase::Settled) > all) crossover = k;
  }
  return {k1 < all && crossover.has_value(),
          "all peers " + std::to_string(all) + ", k=1 " + std::to_string(k1) + ", first k above all peers: " +
              (crossover ? std::to_string(*crossover) : std::string("none"))};
}

Outcome behavior_separation(const QoSDataset& data) {
  bool pass = true;
  std::string detail;
  for (Mechanism m : {Mechanism::OutputAgreement, Mechanism::DasguptaGhosh, Mechanism::Ptsc}) {
    MeanSe truth_minus_random, random_minus_adv;
    for (int s = 1; s <= kBehaviorSeeds; ++s) {
      auto c = desk(m);
      c.seed = static_cast<std::uint64_t>(s);
      const auto r = run_experiment(data, c);
      const double t = to_double(*r.mean_reward(Behavior::Truthful));
      const double rnd = to_double(*r.mean_reward(Behavior::Random));
      const double adv = to_double(*r.mean_reward(Behavior::Adversarial));
      truth_minus_random.add(t - rnd);
      random_minus_adv.add(rnd - adv);
    }
    const bool ok = truth_minus_random.mean() > kSigmas * truth_minus_random.se() &&
                    random_minus_adv.mean() >= -kSigmas * random_minus_adv.se();
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(m)) + " T-R " +
              num(truth_minus_random.mean(), 4) + " (SE " + num(truth_minus_random.se(), 2) + "), R-A " +
              num(random_minus_adv.mean(), 4) + " (SE " + num(random_minus_adv.se(), 2) + ")";
  }
  return {pass, detail};
}

IncentiveScenario scenario(std::size_t n, const Rational& prior, const Rational& bump, std::uint64_t rounds) {
  auto s = IncentiveScenario::from_beliefs("acceptance", n, Rational(1), Rational(1), prior, prior + bump);
  s.alpha = 2 * alpha_bound(n, s.c, s.beliefs);
  s.mc.rounds = rounds;
  s.mc.seed = 7;
  s.mc.threads = worker_threads();
  return s;
}

Outcome truthful_equilibrium() {
  auto s = scenario(10, Rational(19, 20), Rational(1, 100), kEquilibriumRounds);
  const Rational bound = alpha_bound(10, Rational(1), s.beliefs);
  bool pass = bound == Rational(323, 500);
  std::string detail = "bound " + to_decimal(bound, 5) + ", alpha " + to_decimal(s.alpha, 5) + ";";
  for (const auto& d : standard_deviations()) {
    const auto r = equilibrium_check(s, d);
    pass = pass && r.verdict == Verdict::StrictlyPositive;
    detail += " " + d.name() + " " + num(r.difference.mean, 4) + " (SE " + num(r.difference.std_error, 2) + ") " +
              std::string(to_string(r.verdict)) + ";";
  }
  detail += " " + std::to_string(kEquilibriumRounds) + " rounds";
  return {pass, detail};
}

const std::vector<std::size_t> kGridN{5, 10, 25};
const std::vector<Rational> kGridPrior{Rational(7, 10), Rational(9, 10), Rational(19, 20)};
const std::vector<Rational> kGridBump{Rational(1, 100), Rational(5, 100)};

Outcome payment_below_alpha() {
  int cases = 0, ok = 0;
  double worst = -1e9;
  for (auto n : kGridN) {
    for (const auto& prior : kGridPrior) {
      for (const auto& bump : kGridBump) {
        const auto s = scenario(n, prior, bump, kGridRounds);
        const auto pay = payment_monte_carlo(s);
        const double alpha = to_double(s.alpha);
        ++cases;
        ok += pay.lower(kSigmas) <= alpha * (1 + kRelativeFloatSlack);
        worst = std::max(worst, pay.mean / alpha);
      }
    }
  }
  return {ok == cases, std::to_string(ok) + "/" + std::to_string(cases) +
                           " grid points with payment <= alpha (largest payment/alpha " + num(worst, 3) + ")"};
}

Outcome saving_bound() {
  const bool exact = max_saving(Rational(19, 20)) == Rational(9975, 10000);
  int positive = 0, ok = 0;
  std::string misses;
  for (auto n : kGridN) {
    for (const auto& prior : kGridPrior) {
      for (const auto& bump : kGridBump) {
        auto s = scenario(n, prior, bump, kGridRounds);
        s.alpha = Rational(101, 100) * alpha_bound(n, s.c, s.beliefs);
        const Rational bound = saving_lower_bound(s);
        if (bound <= 0) continue;
        ++positive;
        const auto saving = saving_monte_carlo(s);
        if (saving.upper(kSigmas) >= to_double(bound)) {
          ++ok;
        } else {
          misses += " (n=" + std::to_string(n) + " P(1)=" + to_decimal(prior, 3) + " P(1|1)=" +
                    to_decimal(prior + bump, 3) + ": saving " + num(saving.mean, 4) + " < bound " +
                    num(to_double(bound), 4) + ")";
        }
      }
    }
  }
  return {exact && positive > 0 && ok == positive,
          std::string("max_saving(0.95) = ") + to_decimal(max_saving(Rational(19, 20)), 6) + "; " + std::to_string(ok) +
              "/" + std::to_string(positive) + " positive-bound grid points with saving >= bound" +
              (misses.empty() ? "" : "; misses:" + misses)};
}

Outcome conservation() {
  SplitMix64 rng(404);
  int settled = 0, sound = 0, with_penalty = 0, skipped = 0;
  for (int t = 0; settled + skipped < kLedgerRounds; ++t) {
    const auto m = random_matrix(rng, 2 + rng.next() % 7, 1 + rng.next() % 12);
    if (m.answer_count() == 0) continue;
    LedgerConfig c;
    c.mechanism = static_cast<Mechanism>(t % 3);
    c.alpha = Rational(1 + static_cast<int>(rng.next() % 6), 2);
    if (rng.next() % 3 == 0) c.sample_k = 1 + rng.next() % 3;
    c.packing = rng.next() % 2 == 0;
    c.difficulty = rng.next();
    testing::RoundScript script;
    script.key_seed = rng.next();
    script.budget = 1 + static_cast<Units>(rng.next() % 5'000'000'000ULL);
    script.requester_deposit = static_cast<Units>(rng.next() % 3'000'000);
    if (rng.next() % 4 == 0) script.tamper = {0};
    if (rng.next() % 5 == 0) script.withhold = {1};
    try {
      const Ledger ledger = testing::drive_round(c, m, script);
      ++settled;
      Units net = 0;
      for (const auto& [_, v] : ledger.state().transfers) net += v;
      sound += audit(ledger.state()).empty() && net == 0;
      with_penalty += ledger.state().settlement->total_penalties() > 0;
    } catch (const Error& e) {
      if (e.code() != Errc::NoNonCommonQuestions) throw;
      ++skipped;
    }
  }
  return {sound == settled && settled >= kLedgerRounds / 2 && with_penalty > 0,
          std::to_string(sound) + "/" + std::to_string(settled) + " settled rounds balanced, " +
              std::to_string(with_penalty) + " with penalties drawn from deposits, " + std::to_string(skipped) +
              " DG rounds rejected for missing non-common questions"};
}

}  // namespace

int main() {
  const QoSDataset data = synthesize_dataset(50, 50, 1);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"answer-vector capacity and round trip", capacity},
      {"commit-reveal integrity", integrity},
      {"optimized and naive rewards agree", equivalence},
      {"sampled-peer rewards are unbiased", unbiased},
      {"packed writing gas steps at 43", [&] { return packing_steps(data); }},
      {"DG settlement costs the most", [&] { return mechanism_ordering(data); }},
      {"peer sampling gas crossover", [&] { return peer_sampling(data); }},
      {"behavior separation", [&] { return behavior_separation(data); }},
      {"truthful equilibrium above the alpha bound", truthful_equilibrium},
      {"payment stays below alpha", payment_below_alpha},
      {"saving bound", saving_bound},
      {"ledger conservation", conservation},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << num(secs, 3) << " s]"
              << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/" << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
