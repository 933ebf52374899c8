#include "infochain/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "infochain/commitment.hpp"
#include "infochain/config_file.hpp"
#include "infochain/error.hpp"
#include "infochain/peer_selection.hpp"

namespace infochain {

QoSDataset::QoSDataset(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ == 0 || cols_ == 0) throw Error(Errc::EmptyDataset, "dataset has no rows or no columns");
  if (values_.size() != rows_ * cols_) {
    throw Error(Errc::InvalidArgument, fmt::format("{} values for a {}x{} dataset", values_.size(), rows_, cols_));
  }
  for (double& v : values_) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "non-finite response time");
    if (v < 0) v = kMissing;
  }
}

QoSDataset QoSDataset::parse(std::string_view text) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    std::size_t row_cols = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const char ch = line[pos];
      if (ch == ' ' || ch == '\t' || ch == ',' || ch == '\r') {
        ++pos;
        continue;
      }
      const auto end = line.find_first_of(" \t,\r", pos);
      const std::string_view token = line.substr(pos, end == std::string_view::npos ? line.size() - pos : end - pos);
      double v = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw Error(Errc::ParseError, fmt::format("line {}: '{}' is not a number", line_no, token));
      }
      values.push_back(v);
      ++row_cols;
      pos += token.size();
    }
    if (row_cols == 0) continue;
    if (cols != 0 && row_cols != cols) {
      throw Error(Errc::ParseError, fmt::format("line {}: {} columns, expected {}", line_no, row_cols, cols));
    }
    cols = row_cols;
    ++rows;
  }
  if (rows == 0) throw Error(Errc::EmptyDataset, "dataset has no rows");
  return QoSDataset(rows, cols, std::move(values));
}

QoSDataset QoSDataset::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

QoSDataset QoSDataset::submatrix(std::size_t rows, std::size_t cols) const {
  if (rows > rows_ || cols > cols_) {
    throw Error(Errc::InvalidArgument, fmt::format("requested {}x{} from a {}x{} dataset", rows, cols, rows_, cols_));
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.push_back(at(r, c));
  }
  return QoSDataset(rows, cols, std::move(out));
}

QoSDataset synthesize_dataset(std::size_t rows, std::size_t cols, std::uint64_t seed, std::size_t missing_per_row) {
  if (rows == 0 || cols == 0) throw Error(Errc::EmptyDataset, "dataset has no rows or no columns");
  if (missing_per_row >= cols) throw Error(Errc::InvalidArgument, "every row needs a present cell");
  SplitMix64 rng(seed);
  // std::normal_distribution is not reproducible across standard libraries.
  auto normal = [&rng] {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };

  std::vector<double> median(cols);
  for (auto& m : median) m = rng.uniform() < 0.7 ? 0.2 + 0.5 * rng.uniform() : 1.6 + 2.0 * rng.uniform();

  std::vector<double> values(rows * cols);
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) values[r * cols + c] = median[c] * std::exp(0.35 * normal());
    if (missing_per_row == 0) continue;
    std::vector<std::size_t> gaps;
    do {
      gaps = sample_indices(cols, missing_per_row, rng);
      std::sort(gaps.begin(), gaps.end());
    } while (!seen.insert(gaps).second);
    for (std::size_t c : gaps) values[r * cols + c] = QoSDataset::kMissing;
  }
  return QoSDataset(rows, cols, std::move(values));
}

std::string agent_name(std::size_t row) { return fmt::format("a{}", row); }
std::string service_name(std::size_t col) { return fmt::format("s{}", col); }

AnswerMatrix binarize(const QoSDataset& dataset, double threshold_seconds) {
  if (dataset.rows() == 0 || dataset.cols() == 0) throw Error(Errc::EmptyDataset, "dataset has no cells");
  if (!(threshold_seconds > 0)) throw Error(Errc::InvalidArgument, "threshold must be positive");
  std::vector<AgentId> agents;
  std::vector<QuestionId> questions;
  for (std::size_t r = 0; r < dataset.rows(); ++r) agents.push_back(agent_name(r));
  for (std::size_t c = 0; c < dataset.cols(); ++c) questions.push_back(service_name(c));
  AnswerMatrix m(std::move(agents), std::move(questions));
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (std::size_t c = 0; c < dataset.cols(); ++c) {
      if (!dataset.missing(r, c)) m.set(r, c, dataset.at(r, c) <= threshold_seconds);
    }
  }
  return m;
}

std::string_view to_string(Behavior behavior) {
  switch (behavior) {
    case Behavior::Truthful: return "truthful";
    case Behavior::Random: return "random";
    case Behavior::Adversarial: return "adversarial";
  }
  return "?";
}

void BehaviorMix::validate() const {
  if (truthful < 0 || random < 0 || adversarial < 0) throw Error(Errc::InvalidArgument, "negative behavior fraction");
  if (std::abs(truthful + random + adversarial - 1.0) > 1e-9) {
    throw Error(Errc::InvalidArgument, "behavior fractions must sum to 1");
  }
}

AgentPopulation AgentPopulation::from_mix(std::size_t n, const BehaviorMix& mix) {
  mix.validate();
  const auto truthful = static_cast<std::size_t>(std::floor(mix.truthful * static_cast<double>(n) + 1e-9));
  const auto random = std::min(n - truthful,
                               static_cast<std::size_t>(std::floor(mix.random * static_cast<double>(n) + 1e-9)));
  AgentPopulation p;
  p.behaviors.assign(truthful, Behavior::Truthful);
  p.behaviors.insert(p.behaviors.end(), random, Behavior::Random);
  p.behaviors.resize(n, Behavior::Adversarial);
  return p;
}

AgentPopulation AgentPopulation::uniform(std::size_t n, Behavior behavior) {
  return AgentPopulation{std::vector<Behavior>(n, behavior)};
}

AnswerMatrix generate_reports(const AnswerMatrix& truth, const AgentPopulation& population, std::uint64_t seed) {
  if (population.behaviors.size() != truth.agent_count()) {
    throw Error(Errc::InvalidArgument, fmt::format("{} behaviors for {} agents", population.behaviors.size(),
                                                   truth.agent_count()));
  }
  AnswerMatrix reports(truth.agents(), truth.questions());
  for (std::size_t a = 0; a < truth.agent_count(); ++a) {
    SplitMix64 coin(stream_seed(seed, a, 0));
    for (std::size_t q : truth.questions_of(a)) {
      const bool x = truth.value(a, q);
      switch (population.behaviors[a]) {
        case Behavior::Truthful: reports.set(a, q, x); break;
        case Behavior::Random: reports.set(a, q, (coin.next() >> 63) != 0); break;
        case Behavior::Adversarial: reports.set(a, q, !x); break;
      }
    }
  }
  return reports;
}

double ExperimentReport::writing_gas_per_agent() const {
  const double writing = static_cast<double>(phase_gas(Phase::Commit) + phase_gas(Phase::Reveal));
  return behaviors.empty() ? 0.0 : writing / static_cast<double>(behaviors.size());
}

std::optional<Rational> ExperimentReport::mean_reward(Behavior behavior) const {
  Rational sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < behaviors.size(); ++i) {
    if (behaviors[i] != behavior) continue;
    sum += rewards.rewards[i];
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / Rational(count);
}

ExperimentReport run_experiment(const QoSDataset& dataset, const ExperimentConfig& config) {
  if (config.agents == 0 || config.questions == 0) throw Error(Errc::EmptyDataset, "experiment needs agents and questions");
  const AnswerMatrix truth = binarize(dataset.submatrix(config.agents, config.questions), config.threshold_seconds);
  const AgentPopulation population = AgentPopulation::from_mix(config.agents, config.mix);
  const AnswerMatrix reports = generate_reports(truth, population, config.seed);

  LedgerConfig lc;
  lc.mechanism = config.mechanism;
  lc.alpha = config.alpha;
  lc.sample_k = config.sample_k;
  lc.reward_path = config.reward_path;
  lc.packing = config.packing;
  lc.difficulty = config.seed;
  lc.gas = config.gas;
  Ledger ledger(lc);

  const Units budget = static_cast<Units>(config.agents) * kUnitScale;
  ledger.post_questions(truth.questions(), budget, budget);

  std::vector<std::vector<std::size_t>> selected(config.agents);
  for (std::size_t a = 0; a < config.agents; ++a) {
    selected[a] = truth.questions_of(a);
    if (config.questions_per_agent != 0) {
      if (selected[a].size() < config.questions_per_agent) {
        throw Error(Errc::InvalidArgument, fmt::format("agent '{}' has only {} answered questions",
                                                       truth.agents()[a], selected[a].size()));
      }
      selected[a].resize(config.questions_per_agent);
    }
    std::vector<QuestionId> ids;
    for (std::size_t q : selected[a]) ids.push_back(truth.questions()[q]);
    ledger.select_questions(truth.agents()[a], std::move(ids), lc.minimum_deposit());
  }
  ledger.close_selection();

  struct Sealed {
    PackedAnswerVector answers;
    SecretKey key;
  };
  std::vector<std::vector<Sealed>> sealed(config.agents);
  for (std::size_t a = 0; a < config.agents; ++a) {
    const AgentId& agent = truth.agents()[a];
    SplitMix64 key_rng(stream_seed(config.seed, a, 1));
    for (std::size_t b = 0; b < ledger.batch_count(agent); ++b) {
      std::vector<QuestionId> order = ledger.batch_questions(agent, b);
      std::vector<std::pair<QuestionId, bool>> answers;
      for (const auto& q : order) answers.emplace_back(q, reports.value(a, reports.require_question(q)));
      Sealed s{PackedAnswerVector::pack(answers, std::move(order)), SecretKey::from_generator(key_rng)};
      ledger.submit_commitment(agent, b, commit(s.answers, s.key));
      sealed[a].push_back(std::move(s));
    }
  }
  for (std::size_t a = 0; a < config.agents; ++a) {
    for (std::size_t b = 0; b < sealed[a].size(); ++b) {
      ledger.reveal(truth.agents()[a], b, sealed[a][b].answers, sealed[a][b].key);
    }
  }
  const SettlementReport& settlement = ledger.settle();

  ExperimentReport report;
  report.config = config;
  report.behaviors = population.behaviors;
  report.rewards = settlement.rewards;
  report.settlement = settlement;
  report.gas = ledger.state().gas;
  report.events = ledger.events();
  return report;
}

std::vector<ExperimentReport> sweep_packing(const QoSDataset& dataset, const ExperimentConfig& base,
                                            std::size_t max_questions) {
  std::vector<ExperimentReport> out;
  for (bool packed : {true, false}) {
    for (std::size_t n = 1; n <= max_questions; ++n) {
      ExperimentConfig c = base;
      c.packing = packed;
      c.questions_per_agent = n;
      c.id = fmt::format("{}-{}-q{}", base.id, packed ? "packed" : "unpacked", n);
      out.push_back(run_experiment(dataset, c));
    }
  }
  return out;
}

std::vector<ExperimentReport> sweep_mechanisms(const QoSDataset& dataset, const ExperimentConfig& base) {
  std::vector<ExperimentReport> out;
  for (Mechanism m : {Mechanism::OutputAgreement, Mechanism::DasguptaGhosh, Mechanism::Ptsc}) {
    ExperimentConfig c = base;
    c.mechanism = m;
    c.reward_path = RewardPath::Optimized;
    c.id = fmt::format("{}-{}", base.id, to_string(m));
    out.push_back(run_experiment(dataset, c));
  }
  return out;
}

std::vector<ExperimentReport> sweep_reward_paths(const QoSDataset& dataset, const ExperimentConfig& base) {
  std::vector<ExperimentReport> out;
  for (Mechanism m : {Mechanism::OutputAgreement, Mechanism::DasguptaGhosh, Mechanism::Ptsc}) {
    for (RewardPath path : {RewardPath::Optimized, RewardPath::Naive}) {
      ExperimentConfig c = base;
      c.mechanism = m;
      c.reward_path = path;
      c.id = fmt::format("{}-{}-{}", base.id, to_string(m), path == RewardPath::Naive ? "naive" : "optimized");
      out.push_back(run_experiment(dataset, c));
    }
  }
  return out;
}

std::vector<ExperimentReport> sweep_peers(const QoSDataset& dataset, const ExperimentConfig& base,
                                          std::size_t max_k) {
  std::vector<ExperimentReport> out;
  ExperimentConfig all = base;
  all.sample_k.reset();
  all.id = base.id + "-all";
  out.push_back(run_experiment(dataset, all));
  for (std::size_t k = 1; k <= max_k; ++k) {
    ExperimentConfig c = base;
    c.sample_k = k;
    c.id = fmt::format("{}-k{}", base.id, k);
    out.push_back(run_experiment(dataset, c));
  }
  return out;
}

void write_experiment_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
  out << "config_id,mechanism,packing,k_peers,agents,questions_per_agent,phase,gas,"
         "mean_reward_truthful,mean_reward_random,mean_reward_adversarial\n";
  for (const auto& r : reports) {
    auto mean = [&](Behavior b) {
      const auto m = r.mean_reward(b);
      return m ? to_decimal(*m) : std::string();
    };
    const std::string tail =
        fmt::format("{},{},{}", mean(Behavior::Truthful), mean(Behavior::Random), mean(Behavior::Adversarial));
    const std::string head = fmt::format(
        "{},{},{},{},{},{}", r.config.id, to_string(r.config.mechanism), r.config.packing ? "on" : "off",
        r.config.sample_k ? std::to_string(*r.config.sample_k) : std::string("all"), r.config.agents,
        r.config.questions_per_agent == 0 ? std::string("all") : std::to_string(r.config.questions_per_agent));
    for (Phase p : {Phase::Posting, Phase::Selection, Phase::Commit, Phase::Reveal, Phase::Settled}) {
      out << head << ',' << to_string(p) << ',' << r.phase_gas(p) << ',' << tail << '\n';
    }
    out << head << ",total," << r.gas.total << ',' << tail << '\n';
  }
}

}  // namespace infochain
