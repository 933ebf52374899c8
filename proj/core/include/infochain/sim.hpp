#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infochain/answer_matrix.hpp"
#include "infochain/event_log.hpp"
#include "infochain/gas_model.hpp"
#include "infochain/ledger.hpp"
#include "infochain/mechanisms.hpp"
#include "infochain/rational.hpp"

namespace infochain {

/// Dense agent x service response-time matrix in seconds; negative cells
/// are missing.
class QoSDataset {
 public:
  static constexpr double kMissing = -1.0;

  QoSDataset() = default;
  /// Throws EmptyDataset for a zero dimension and InvalidArgument when the
  /// value count does not match.
  QoSDataset(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// Whitespace- or comma-separated rows, one agent per line. Every row must
  /// have the same number of columns.
  static QoSDataset parse(std::string_view text);
  static QoSDataset load(const std::filesystem::path& path);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  bool missing(std::size_t r, std::size_t c) const { return at(r, c) < 0; }

  /// Top-left corner. Throws InvalidArgument when larger than the dataset.
  QoSDataset submatrix(std::size_t rows, std::size_t cols) const;

  friend bool operator==(const QoSDataset&, const QoSDataset&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Desk-scale stand-in for the response-time matrix: about 70% of services
/// are fast, latencies are lognormal around a per-service median and every
/// row misses `missing_per_row` cells, with no two rows missing the same set.
QoSDataset synthesize_dataset(std::size_t rows, std::size_t cols, std::uint64_t seed,
                              std::size_t missing_per_row = 5);

/// "a<row>" and "s<col>".
std::string agent_name(std::size_t row);
std::string service_name(std::size_t col);

/// value <= threshold -> 1, value > threshold -> 0, missing -> unanswered.
/// Throws EmptyDataset and InvalidArgument for a nonpositive threshold.
AnswerMatrix binarize(const QoSDataset& dataset, double threshold_seconds = 1.0);

enum class Behavior { Truthful, Random, Adversarial };
std::string_view to_string(Behavior behavior);

struct BehaviorMix {
  double truthful = 0.5;
  double random = 0.25;
  double adversarial = 0.25;

  /// Throws InvalidArgument unless the fractions are nonnegative and sum to 1.
  void validate() const;
};

struct AgentPopulation {
  std::vector<Behavior> behaviors;

  /// floor(truthful * n) truthful agents, then floor(random * n) random
  /// ones; the rest are adversarial.
  static AgentPopulation from_mix(std::size_t n, const BehaviorMix& mix);
  static AgentPopulation uniform(std::size_t n, Behavior behavior);
};

/// Truthful copies, Random tosses a fair coin, Adversarial flips. Only the
/// cells answered in `truth` are reported.
AnswerMatrix generate_reports(const AnswerMatrix& truth, const AgentPopulation& population, std::uint64_t seed);

struct ExperimentConfig {
  std::string id = "run";
  Mechanism mechanism = Mechanism::OutputAgreement;
  Rational alpha{1};
  std::optional<std::size_t> sample_k;
  bool packing = true;
  RewardPath reward_path = RewardPath::Optimized;
  std::size_t agents = 50;
  std::size_t questions = 50;
  /// Each agent answers the first this-many present columns of its row;
  /// 0 means all of them.
  std::size_t questions_per_agent = 0;
  std::uint64_t seed = 1;
  double threshold_seconds = 1.0;
  BehaviorMix mix;
  GasTable gas;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<Behavior> behaviors;
  RewardReport rewards;
  SettlementReport settlement;
  GasLedger gas;
  std::vector<Event> events;

  std::uint64_t phase_gas(Phase phase) const { return gas.phase_total(phase); }
  /// Commit plus reveal gas per agent.
  double writing_gas_per_agent() const;
  /// Mean mechanism reward of agents with `behavior`, or nullopt if none.
  std::optional<Rational> mean_reward(Behavior behavior) const;
};

/// Runs post, select, commit, reveal and settle on a ledger for the
/// dataset's top-left agents x questions corner.
ExperimentReport run_experiment(const QoSDataset& dataset, const ExperimentConfig& config);

/// Packed and unpacked runs for questions_per_agent = 1..max_questions.
std::vector<ExperimentReport> sweep_packing(const QoSDataset& dataset, const ExperimentConfig& base,
                                            std::size_t max_questions);
/// One run per mechanism with the optimized path.
std::vector<ExperimentReport> sweep_mechanisms(const QoSDataset& dataset, const ExperimentConfig& base);
/// Optimized and naive runs per mechanism.
std::vector<ExperimentReport> sweep_reward_paths(const QoSDataset& dataset, const ExperimentConfig& base);
/// All peers, then k = 1..max_k sampled peers.
std::vector<ExperimentReport> sweep_peers(const QoSDataset& dataset, const ExperimentConfig& base,
                                          std::size_t max_k);

/// Header `config_id,mechanism,packing,k_peers,agents,questions_per_agent,
/// phase,gas,mean_reward_truthful,mean_reward_random,mean_reward_adversarial`,
/// one row per phase plus a "total" row.
void write_experiment_csv(std::ostream& out, std::span<const ExperimentReport> reports);

}  // namespace infochain
