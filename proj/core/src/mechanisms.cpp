#include "infochain/mechanisms.hpp"

#include <algorithm>

#include "infochain/commitment.hpp"
#include "infochain/error.hpp"

namespace infochain {

PeerMode PeerMode::sampled(std::size_t k, SelectionSeed seed) {
  if (k == 0) throw Error(Errc::InvalidArgument, "sampled peer count must be at least 1");
  return PeerMode{k, seed};
}

const Rational& RewardReport::reward(const AgentId& agent) const {
  auto it = std::find(agents.begin(), agents.end(), agent);
  if (it == agents.end()) throw Error(Errc::UnknownAgent, "'" + agent + "'");
  return rewards[static_cast<std::size_t>(it - agents.begin())];
}

FrequencyTable::FrequencyTable(const AnswerMatrix& matrix, OpCounts* ops)
    : per_agent_(matrix.agent_count()) {
  for (std::size_t a = 0; a < matrix.agent_count(); ++a) {
    for (std::size_t q = 0; q < matrix.question_count(); ++q) {
      if (!matrix.answered(a, q)) continue;
      if (matrix.value(a, q)) {
        ++per_agent_[a].ones;
      } else {
        ++per_agent_[a].zeros;
      }
    }
    global_.ones += per_agent_[a].ones;
    global_.zeros += per_agent_[a].zeros;
  }
  if (ops) {
    ops->arithmetic += matrix.answer_count() + 2 * matrix.agent_count();
    ops->memory_words += matrix.answer_count() + 2 * matrix.agent_count();
  }
}

std::optional<Rational> FrequencyTable::relative_frequency(std::size_t agent, bool y) const {
  const AnswerCounts& own = per_agent_.at(agent);
  const std::uint64_t others_total = global_.total() - own.total();
  if (others_total == 0) return std::nullopt;
  return Rational(global_.count(y) - own.count(y)) / others_total;
}

namespace {

Rational ratio(std::uint64_t num, std::uint64_t den) { return Rational(num) / den; }

/// Shared per-call state for both reward paths.
class Evaluation {
 public:
  Evaluation(const AnswerMatrix& m, Mechanism mechanism, const Rational& alpha, const PeerMode& mode,
             OpCounts* ops)
      : m_(m), mode_(mode), ops_(ops ? *ops : sink_) {
    if (m.answer_count() == 0) throw Error(Errc::EmptyMatrix, "no answers to score");
    if (mechanism == Mechanism::Ptsc && alpha <= 0) {
      throw Error(Errc::InvalidArgument, "PTSC scaling constant must be positive");
    }
    report_.mechanism = mechanism;
    report_.alpha = mechanism == Mechanism::Ptsc ? alpha : Rational(1);
    report_.peer_mode = mode;
    report_.agents = m.agents();
    report_.rewards.assign(m.agent_count(), Rational(0));
    report_.scored_questions.assign(m.agent_count(), 0);
    sums_.assign(m.agent_count(), Rational(0));

    questions_of_.resize(m.agent_count());
    answerers_of_.resize(m.question_count());
    for (std::size_t a = 0; a < m.agent_count(); ++a) {
      questions_of_[a] = m.questions_of(a);
      const std::size_t n = questions_of_[a].size();
      if (n == 0) continue;
      // one packed storage word per commitment batch, then shift+mask per answer
      ops_.storage_reads += batch_count(n);
      ops_.arithmetic += 2 * n;
      ops_.memory_words += n;
      for (std::size_t q : questions_of_[a]) answerers_of_[q].push_back(a);
    }
    if (mode.is_sampled()) {
      base_seed_ = mode.seed.derive();
      ops_.hashes += 1;
      ops_.hash_words += 2;
    }
  }

  Evaluation(const Evaluation&) = delete;
  Evaluation& operator=(const Evaluation&) = delete;

  const AnswerMatrix& matrix() const { return m_; }
  const PeerMode& mode() const { return mode_; }
  OpCounts& ops() { return ops_; }
  const std::vector<std::size_t>& questions_of(std::size_t a) const { return questions_of_[a]; }
  const std::vector<std::size_t>& answerers_of(std::size_t q) const { return answerers_of_[q]; }
  const Rational& alpha() const { return report_.alpha; }

  /// Other answerers of q from the precomputed answerer list.
  std::vector<std::size_t> candidates_indexed(std::size_t agent, std::size_t q) const {
    std::vector<std::size_t> out;
    out.reserve(answerers_of_[q].size());
    for (std::size_t p : answerers_of_[q]) {
      if (p != agent) out.push_back(p);
    }
    return out;
  }

  /// Other answerers of q found by scanning every agent.
  std::vector<std::size_t> candidates_scanned(std::size_t agent, std::size_t q) {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < m_.agent_count(); ++p) {
      if (p == agent) continue;
      ops_.comparisons += 1;
      ops_.memory_words += 1;
      if (m_.answered(p, q)) out.push_back(p);
    }
    return out;
  }

  std::vector<std::size_t> pick(std::vector<std::size_t> candidates, std::size_t agent, std::size_t q) {
    if (!mode_.is_sampled() || candidates.empty()) return candidates;
    const std::size_t k = std::min(*mode_.sample_k, candidates.size());
    SplitMix64 rng(stream_seed(base_seed_, agent, q));
    ops_.hashes += 1;
    ops_.hash_words += 3;
    ops_ += sampling_ops(SamplingMethod::FisherYatesPrefix, candidates.size(), k, k);
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i : sample_indices(candidates.size(), k, rng)) out.push_back(candidates[i]);
    return out;
  }

  void add_score(std::size_t agent, const Rational& score) {
    sums_[agent] += score;
    ++report_.scored_questions[agent];
  }

  RewardReport finish() {
    for (std::size_t a = 0; a < sums_.size(); ++a) {
      if (report_.scored_questions[a] == 0) continue;
      report_.rewards[a] = sums_[a] / report_.scored_questions[a];
      ops_.arithmetic += 1;
      ops_.memory_words += 1;
    }
    return std::move(report_);
  }

 private:
  const AnswerMatrix& m_;
  PeerMode mode_;
  OpCounts sink_;
  OpCounts& ops_;
  std::uint64_t base_seed_ = 0;
  RewardReport report_;
  std::vector<Rational> sums_;
  std::vector<std::vector<std::size_t>> questions_of_;
  std::vector<std::vector<std::size_t>> answerers_of_;
};

std::vector<AnswerCounts> question_tallies(Evaluation& ev) {
  const AnswerMatrix& m = ev.matrix();
  std::vector<AnswerCounts> tally(m.question_count());
  for (std::size_t q = 0; q < m.question_count(); ++q) {
    for (std::size_t a : ev.answerers_of(q)) {
      if (m.value(a, q)) {
        ++tally[q].ones;
      } else {
        ++tally[q].zeros;
      }
    }
    ev.ops().arithmetic += ev.answerers_of(q).size();
    ev.ops().memory_words += ev.answerers_of(q).size();
  }
  return tally;
}

std::size_t count_matches(Evaluation& ev, std::size_t q, bool y, const std::vector<std::size_t>& peers) {
  std::size_t matches = 0;
  for (std::size_t p : peers) {
    if (ev.matrix().value(p, q) == y) ++matches;
  }
  ev.ops().memory_words += peers.size();
  ev.ops().comparisons += peers.size();
  ev.ops().arithmetic += peers.size();
  return matches;
}

[[noreturn]] void throw_no_non_common(const AnswerMatrix& m, std::size_t a, std::size_t p) {
  throw Error(Errc::NoNonCommonQuestions,
              "agents '" + m.agents()[a] + "' and '" + m.agents()[p] +
                  "' need questions answered by only one of them");
}

// ---------------------------------------------------------------- optimized

RewardReport oa_optimized(Evaluation& ev) {
  const AnswerMatrix& m = ev.matrix();
  std::vector<AnswerCounts> tally;
  if (!ev.mode().is_sampled()) tally = question_tallies(ev);
  for (std::size_t i = 0; i < m.agent_count(); ++i) {
    for (std::size_t q : ev.questions_of(i)) {
      const bool y = m.value(i, q);
      if (!ev.mode().is_sampled()) {
        const std::size_t answerers = ev.answerers_of(q).size();
        if (answerers < 2) continue;
        ev.ops().memory_words += 2;
        ev.ops().arithmetic += 3;
        ev.add_score(i, ratio(tally[q].count(y) - 1, answerers - 1));
      } else {
        auto peers = ev.pick(ev.candidates_indexed(i, q), i, q);
        if (peers.empty()) continue;
        const std::size_t matches = count_matches(ev, q, y, peers);
        ev.ops().arithmetic += 1;
        ev.add_score(i, ratio(matches, peers.size()));
      }
    }
  }
  return ev.finish();
}

class PenaltyCache {
 public:
  explicit PenaltyCache(Evaluation& ev) : ev_(ev), n_(ev.matrix().agent_count()), cache_(n_ * n_), ones_(n_) {
    const AnswerMatrix& m = ev.matrix();
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t q : ev.questions_of(a)) ones_[a] += m.value(a, q) ? 1 : 0;
      ev.ops().arithmetic += ev.questions_of(a).size();
      ev.ops().memory_words += ev.questions_of(a).size();
    }
  }

  const Rational& get(std::size_t i, std::size_t p) {
    ev_.ops().comparisons += 1;
    ev_.ops().memory_words += 1;
    auto& slot = cache_[std::min(i, p) * n_ + std::max(i, p)];
    if (!slot) slot = compute(i, p);
    return *slot;
  }

 private:
  Rational compute(std::size_t i, std::size_t p) {
    const AnswerMatrix& m = ev_.matrix();
    const auto& qi = ev_.questions_of(i);
    const auto& qp = ev_.questions_of(p);
    std::uint64_t common = 0, ones_i_common = 0, ones_p_common = 0;
    auto a = qi.begin();
    auto b = qp.begin();
    while (a != qi.end() && b != qp.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++common;
        ones_i_common += m.value(i, *a) ? 1 : 0;
        ones_p_common += m.value(p, *b) ? 1 : 0;
        ++a;
        ++b;
      }
    }
    ev_.ops().memory_words += qi.size() + qp.size();
    ev_.ops().comparisons += qi.size() + qp.size();
    ev_.ops().arithmetic += 10;

    const std::uint64_t only_i = qi.size() - common;
    const std::uint64_t only_p = qp.size() - common;
    if (only_i == 0 || only_p == 0) throw_no_non_common(m, i, p);
    const std::uint64_t ones_i = ones_[i] - ones_i_common;
    const std::uint64_t ones_p = ones_[p] - ones_p_common;
    const std::uint64_t agreeing = ones_i * ones_p + (only_i - ones_i) * (only_p - ones_p);
    return ratio(agreeing, only_i * only_p);
  }

  Evaluation& ev_;
  std::size_t n_;
  std::vector<std::optional<Rational>> cache_;
  std::vector<std::uint64_t> ones_;
};

RewardReport dg_optimized(Evaluation& ev) {
  const AnswerMatrix& m = ev.matrix();
  PenaltyCache penalties(ev);
  for (std::size_t i = 0; i < m.agent_count(); ++i) {
    for (std::size_t q : ev.questions_of(i)) {
      auto peers = ev.pick(ev.candidates_indexed(i, q), i, q);
      if (peers.empty()) continue;
      const bool y = m.value(i, q);
      std::size_t matches = 0;
      Rational penalty_sum = 0;
      for (std::size_t p : peers) {
        if (m.value(p, q) == y) ++matches;
        penalty_sum += penalties.get(i, p);
      }
      ev.ops().memory_words += peers.size();
      ev.ops().comparisons += peers.size();
      ev.ops().arithmetic += 2 * peers.size() + 2;
      ev.add_score(i, (Rational(matches) - penalty_sum) / peers.size());
    }
  }
  return ev.finish();
}

Rational ptsc_score(const Rational& alpha, std::size_t matches, std::size_t peers,
                    const std::optional<Rational>& r) {
  if (!r || *r == 0) return Rational(0);
  return alpha * (Rational(matches) / (*r * peers) - 1);
}

RewardReport ptsc_optimized(Evaluation& ev) {
  const AnswerMatrix& m = ev.matrix();
  const FrequencyTable table(m, &ev.ops());
  std::vector<AnswerCounts> tally;
  if (!ev.mode().is_sampled()) tally = question_tallies(ev);

  for (std::size_t i = 0; i < m.agent_count(); ++i) {
    if (ev.questions_of(i).empty()) continue;
    const std::optional<Rational> r[2] = {table.relative_frequency(i, false), table.relative_frequency(i, true)};
    ev.ops().arithmetic += 4;
    for (std::size_t q : ev.questions_of(i)) {
      const bool y = m.value(i, q);
      std::size_t matches = 0;
      std::size_t peers = 0;
      if (!ev.mode().is_sampled()) {
        const std::size_t answerers = ev.answerers_of(q).size();
        if (answerers < 2) continue;
        matches = tally[q].count(y) - 1;
        peers = answerers - 1;
        ev.ops().memory_words += 2;
      } else {
        auto picked = ev.pick(ev.candidates_indexed(i, q), i, q);
        if (picked.empty()) continue;
        matches = count_matches(ev, q, y, picked);
        peers = picked.size();
      }
      ev.ops().comparisons += 1;
      ev.ops().arithmetic += 4;
      ev.add_score(i, ptsc_score(ev.alpha(), matches, peers, r[y ? 1 : 0]));
    }
  }
  return ev.finish();
}

// -------------------------------------------------------------------- naive

RewardReport oa_naive(Evaluation& ev) {
  const AnswerMatrix& m = ev.matrix();
  for (std::size_t i = 0; i < m.agent_count(); ++i) {
    for (std::size_t q = 0; q < m.question_count(); ++q) {
      ev.ops().comparisons += 1;
      if (!m.answered(i, q)) continue;
      auto peers = ev.pick(ev.candidates_scanned(i, q), i, q);
      if (peers.empty()) continue;
      const std::size_t matches = count_matches(ev, q, m.value(i, q), peers);
      ev.ops().arithmetic += 1;
      ev.add_score(i, ratio(matches, peers.size()));
    }
  }
  return ev.finish();
}

Rational naive_penalty(Evaluation& ev, std::size_t i, std::size_t p) {
  const AnswerMatrix& m = ev.matrix();
  const std::size_t questions = m.question_count();
  std::uint64_t pairs = 0;
  std::uint64_t agreeing = 0;
  for (std::size_t q1 = 0; q1 < questions; ++q1) {
    ev.ops().comparisons += 2;
    ev.ops().memory_words += 2;
    if (!m.answered(i, q1) || m.answered(p, q1)) continue;
    for (std::size_t q2 = 0; q2 < questions; ++q2) {
      ev.ops().comparisons += 2;
      ev.ops().memory_words += 2;
      if (!m.answered(p, q2) || m.answered(i, q2)) continue;
      ++pairs;
      if (m.value(i, q1) == m.value(p, q2)) ++agreeing;
      ev.ops().comparisons += 1;
      ev.ops().arithmetic += 2;
    }
  }
  if (pairs == 0) throw_no_non_common(m, i, p);
  ev.ops().arithmetic += 1;
  return ratio(agreeing, pairs);
}

RewardReport dg_naive(Evaluation& ev) {
  const AnswerMatrix& m = ev.matrix();
  for (std::size_t i = 0; i < m.agent_count(); ++i) {
    for (std::size_t q = 0; q < m.question_count(); ++q) {
      ev.ops().comparisons += 1;
      if (!m.answered(i, q)) continue;
      auto peers = ev.pick(ev.candidates_scanned(i, q), i, q);
      if (peers.empty()) continue;
      const bool y = m.value(i, q);
      Rational total = 0;
      for (std::size_t p : peers) {
        ev.ops().memory_words += 1;
        ev.ops().comparisons += 1;
        ev.ops().arithmetic += 2;
        total += Rational(m.value(p, q) == y ? 1 : 0) - naive_penalty(ev, i, p);
      }
      ev.add_score(i, total / peers.size());
    }
  }
  return ev.finish();
}

RewardReport ptsc_naive(Evaluation& ev) {
  const AnswerMatrix& m = ev.matrix();
  for (std::size_t i = 0; i < m.agent_count(); ++i) {
    for (std::size_t q = 0; q < m.question_count(); ++q) {
      ev.ops().comparisons += 1;
      if (!m.answered(i, q)) continue;
      auto peers = ev.pick(ev.candidates_scanned(i, q), i, q);
      if (peers.empty()) continue;
      const bool y = m.value(i, q);

      std::uint64_t same = 0;
      std::uint64_t total = 0;
      for (std::size_t a = 0; a < m.agent_count(); ++a) {
        if (a == i) continue;
        for (std::size_t q2 = 0; q2 < m.question_count(); ++q2) {
          ev.ops().comparisons += 1;
          ev.ops().memory_words += 1;
          if (!m.answered(a, q2)) continue;
          ++total;
          if (m.value(a, q2) == y) ++same;
          ev.ops().arithmetic += 1;
        }
      }
      ev.ops().arithmetic += 2;
      const Rational r = ratio(same, total);

      Rational score_sum = 0;
      for (std::size_t p : peers) {
        ev.ops().memory_words += 1;
        ev.ops().comparisons += 1;
        ev.ops().arithmetic += 2;
        if (r == 0) continue;
        score_sum += ev.alpha() * (Rational(m.value(p, q) == y ? 1 : 0) / r - 1);
      }
      ev.add_score(i, score_sum / peers.size());
    }
  }
  return ev.finish();
}

}  // namespace

RewardReport oa_rewards(const AnswerMatrix& matrix, const PeerMode& mode, OpCounts* ops) {
  Evaluation ev(matrix, Mechanism::OutputAgreement, 1, mode, ops);
  return oa_optimized(ev);
}

RewardReport dg_rewards(const AnswerMatrix& matrix, const PeerMode& mode, OpCounts* ops) {
  Evaluation ev(matrix, Mechanism::DasguptaGhosh, 1, mode, ops);
  return dg_optimized(ev);
}

RewardReport ptsc_rewards(const AnswerMatrix& matrix, const Rational& alpha, const PeerMode& mode,
                          OpCounts* ops) {
  Evaluation ev(matrix, Mechanism::Ptsc, alpha, mode, ops);
  return ptsc_optimized(ev);
}

RewardReport compute_rewards(const AnswerMatrix& matrix, Mechanism mechanism, const Rational& alpha,
                             const PeerMode& mode, OpCounts* ops) {
  switch (mechanism) {
    case Mechanism::OutputAgreement: return oa_rewards(matrix, mode, ops);
    case Mechanism::DasguptaGhosh: return dg_rewards(matrix, mode, ops);
    case Mechanism::Ptsc: return ptsc_rewards(matrix, alpha, mode, ops);
  }
  throw Error(Errc::InvalidArgument, "unknown mechanism");
}

RewardReport rewards_naive(const AnswerMatrix& matrix, Mechanism mechanism, const Rational& alpha,
                           const PeerMode& mode, OpCounts* ops) {
  Evaluation ev(matrix, mechanism, alpha, mode, ops);
  switch (mechanism) {
    case Mechanism::OutputAgreement: return oa_naive(ev);
    case Mechanism::DasguptaGhosh: return dg_naive(ev);
    case Mechanism::Ptsc: return ptsc_naive(ev);
  }
  throw Error(Errc::InvalidArgument, "unknown mechanism");
}

}  // namespace infochain
