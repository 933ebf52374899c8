#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "infochain/answer_matrix.hpp"
#include "infochain/gas_model.hpp"
#include "infochain/peer_selection.hpp"
#include "infochain/rational.hpp"
#include "infochain/types.hpp"

namespace infochain {

/// Which peers an agent is compared with on a question: every other answerer,
/// or k of them drawn without replacement from a per-(agent, question) stream.
struct PeerMode {
  std::optional<std::size_t> sample_k;
  SelectionSeed seed;

  static PeerMode all_peers() { return {}; }
  /// Throws InvalidArgument when k == 0.
  static PeerMode sampled(std::size_t k, SelectionSeed seed);

  bool is_sampled() const { return sample_k.has_value(); }

  friend bool operator==(const PeerMode&, const PeerMode&) = default;
};

struct RewardReport {
  Mechanism mechanism = Mechanism::OutputAgreement;
  Rational alpha{1};
  PeerMode peer_mode;
  std::vector<AgentId> agents;
  std::vector<Rational> rewards;
  /// Questions that entered each agent's average (those with at least one peer).
  std::vector<std::size_t> scored_questions;

  /// Throws UnknownAgent.
  const Rational& reward(const AgentId& agent) const;

  friend bool operator==(const RewardReport&, const RewardReport&) = default;
};

struct AnswerCounts {
  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;

  std::uint64_t total() const { return zeros + ones; }
  std::uint64_t count(bool y) const { return y ? ones : zeros; }

  friend bool operator==(const AnswerCounts&, const AnswerCounts&) = default;
};

/// Per-agent and global answer counts; the intermediary values that let the
/// PTSC path compute every R_i(y) without rescanning the matrix.
class FrequencyTable {
 public:
  explicit FrequencyTable(const AnswerMatrix& matrix, OpCounts* ops = nullptr);

  const std::vector<AnswerCounts>& per_agent() const { return per_agent_; }
  const AnswerCounts& global() const { return global_; }

  /// num_i(y) / (num_i(0) + num_i(1)) over everyone's answers except agent
  /// i's, or nullopt when the others gave no answers at all.
  std::optional<Rational> relative_frequency(std::size_t agent, bool y) const;

 private:
  std::vector<AnswerCounts> per_agent_;
  AnswerCounts global_;
};

/// Output Agreement: per question, the fraction of peers giving the same
/// answer; the reward is the mean over the agent's scored questions.
RewardReport oa_rewards(const AnswerMatrix& matrix, const PeerMode& mode = PeerMode::all_peers(),
                        OpCounts* ops = nullptr);

/// Dasgupta-Ghosh: agreement minus the pair's mean agreement over all
/// (own-only question, peer-only question) pairs. Throws
/// NoNonCommonQuestions when a compared pair lacks one side of that product.
RewardReport dg_rewards(const AnswerMatrix& matrix, const PeerMode& mode = PeerMode::all_peers(),
                        OpCounts* ops = nullptr);

/// PTSC: alpha * (match / R_i(y) - 1), or 0 when R_i(y) = 0.
RewardReport ptsc_rewards(const AnswerMatrix& matrix, const Rational& alpha,
                          const PeerMode& mode = PeerMode::all_peers(), OpCounts* ops = nullptr);

/// Dispatches to the optimized path of `mechanism`; alpha is ignored for OA/DG.
RewardReport compute_rewards(const AnswerMatrix& matrix, Mechanism mechanism, const Rational& alpha,
                             const PeerMode& mode = PeerMode::all_peers(), OpCounts* ops = nullptr);

/// Reference path: recomputes peers, penalties and frequencies from the raw
/// matrix for every (agent, question) instead of reusing intermediary values.
/// Produces the same rewards as compute_rewards, at a much higher op count.
RewardReport rewards_naive(const AnswerMatrix& matrix, Mechanism mechanism, const Rational& alpha,
                           const PeerMode& mode = PeerMode::all_peers(), OpCounts* ops = nullptr);

}  // namespace infochain
