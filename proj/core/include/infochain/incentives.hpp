#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infochain/peer_selection.hpp"
#include "infochain/rational.hpp"

namespace infochain {

/// One agent's subjective beliefs about a random peer's observation.
struct AgentBelief {
  Rational prior_1;         // P(x_p = 1)
  Rational post_1_given_1;  // P(x_p = 1 | x_i = 1)
  Rational post_0_given_1;  // P(x_p = 0 | x_i = 1)
  Rational post_0_given_0;  // P(x_p = 0 | x_i = 0)

  /// Exchangeable beliefs from the prior and P(x_p = 1 | x_i = 1); the
  /// remaining posteriors follow from P(1,1) = prior * post_1_given_1.
  static AgentBelief exchangeable(const Rational& prior_1, const Rational& post_1_given_1);

  friend bool operator==(const AgentBelief&, const AgentBelief&) = default;
};

struct BeliefModel {
  std::vector<AgentBelief> agents;

  static BeliefModel uniform(const AgentBelief& belief, std::size_t n);

  /// Throws DegeneratePrior unless every prior lies in (0, 1), and
  /// InvalidArgument for a posterior outside [0, 1] or posteriors given 1
  /// that do not sum to 1.
  void validate() const;

  friend bool operator==(const BeliefModel&, const BeliefModel&) = default;
};

/// min over agents of P(1|1)/P(1) - P(0|1)/P(0).
Rational beta(const BeliefModel& model);
/// max over agents of P(0|1).
Rational gamma(const BeliefModel& model);
/// c * (1 + (n-1) gamma) / (n beta). Throws NonPositiveBeta when beta <= 0.
Rational alpha_bound(std::size_t n, const Rational& c, const BeliefModel& model);

/// Two-state mixture: each question is High with probability w, and every
/// agent independently observes 1 with probability h (High) or l (Low).
struct GenerativeWorld {
  double w = 1.0;
  double h = 0.5;
  double l = 0.5;

  double prior_1() const { return w * h + (1 - w) * l; }
  double post_1_given_1() const { return (w * h * h + (1 - w) * l * l) / prior_1(); }

  friend bool operator==(const GenerativeWorld&, const GenerativeWorld&) = default;
};

/// Solves for (w, h) with l = 1 - h by bisection on h. Throws NoSolution when
/// the posterior is below the prior or outside (0, 1).
GenerativeWorld calibrate_world(double prior_1, double post_1_given_1);

struct MonteCarloSettings {
  /// Questions simulated per estimate; one question is one round.
  std::uint64_t rounds = 100000;
  /// Questions per batch. Relative frequencies are computed within a batch
  /// and standard errors come from batch means.
  std::size_t batch_questions = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  friend bool operator==(const MonteCarloSettings&, const MonteCarloSettings&) = default;
};

struct IncentiveScenario {
  std::string id = "scenario";
  std::size_t n = 10;
  Rational c{1};
  Rational alpha{1};
  /// P(1): probability that a truthful report is 1.
  Rational prior_1;
  BeliefModel beliefs;
  GenerativeWorld world;
  MonteCarloSettings mc;

  /// Homogeneous scenario with exchangeable beliefs and a calibrated world.
  static IncentiveScenario from_beliefs(std::string id, std::size_t n, const Rational& c, const Rational& alpha,
                                        const Rational& prior_1, const Rational& post_1_given_1);

  /// Throws InvalidArgument unless n >= 2, c > 0, alpha > 0 and the
  /// Monte-Carlo settings are usable.
  void validate() const;
};

struct Estimate {
  double mean = 0;
  double std_error = 0;
  std::uint64_t rounds = 0;

  /// mean - k * std_error
  double lower(double k = 3) const { return mean - k * std_error; }
  double upper(double k = 3) const { return mean + k * std_error; }
};

/// Fraction of reports equal to 0.
Rational outcome(std::span<const bool> reports);

/// Closed form: alpha.
Rational expected_payment_per_agent(const IncentiveScenario& scenario);
/// Mean PTSC payment per agent and question under truthful play.
Estimate payment_monte_carlo(const IncentiveScenario& scenario);

/// p1 * (2 - p1).
Rational max_saving(const Rational& p1);
/// p1 * (2 - p1) - alpha / c.
Rational saving_lower_bound(const IncentiveScenario& scenario);
/// Mean over questions of (n c - PTSC payments - refunds) / (n c) under
/// truthful play.
Estimate saving_monte_carlo(const IncentiveScenario& scenario);

struct Deviation {
  enum class Kind { Truthful, AlwaysZero, AlwaysOne, Flip, Random };
  Kind kind = Kind::Truthful;
  /// Probability of reporting 1 for Random.
  double p = 0.5;

  static Deviation truthful() { return {Kind::Truthful, 0.5}; }
  static Deviation always(bool y) { return {y ? Kind::AlwaysOne : Kind::AlwaysZero, 0.5}; }
  static Deviation flip() { return {Kind::Flip, 0.5}; }
  static Deviation random(double p) { return {Kind::Random, p}; }

  /// "truthful", "always_0", "always_1", "flip", "random_0.5".
  std::string name() const;
};

enum class Verdict { StrictlyPositive, NotSignificant };
std::string_view to_string(Verdict verdict);

/// Paired estimate of E[u | truthful] - E[u | deviation] for agent 0 against
/// truthful peers, with u = PTSC reward + c * o_q * [report = 0]. Both arms
/// share observations, peer draws and batch frequencies.
Estimate utility_difference(const IncentiveScenario& scenario, const Deviation& deviation);

struct EquilibriumResult {
  Verdict verdict = Verdict::NotSignificant;
  Estimate difference;
};

/// StrictlyPositive iff the utility difference exceeds 3 standard errors.
/// Throws AlphaTooSmall when alpha <= alpha_bound.
EquilibriumResult equilibrium_check(const IncentiveScenario& scenario, const Deviation& deviation);

/// The four deviations reported per scenario.
std::vector<Deviation> standard_deviations();

struct IncentiveRow {
  std::string scenario_id;
  Rational alpha_bound;
  Rational alpha_used;
  Estimate payment;
  Rational saving_bound;
  Estimate saving;
  /// Empty result when alpha does not exceed the bound.
  std::vector<std::pair<Deviation, std::optional<EquilibriumResult>>> verdicts;
};

/// Scenario file keys:
///   id, n (one value or a comma list), c, prior_1, posterior_bump,
///   alpha (decimal or "auto"), alpha_margin (used with auto, default 2),
///   rounds, batch_questions, seed, threads.
/// One scenario per value of n; ids get a "-n<N>" suffix for lists.
std::vector<IncentiveScenario> parse_scenarios(std::string_view text,
                                               const std::optional<Rational>& alpha_override = std::nullopt);
std::vector<IncentiveScenario> load_scenarios(const std::filesystem::path& path,
                                              const std::optional<Rational>& alpha_override = std::nullopt);

/// Bound, payment and saving estimates and one verdict per standard
/// deviation. Verdicts are reported as "alpha_too_small" when alpha does not
/// exceed the bound.
IncentiveRow evaluate_scenario(const IncentiveScenario& scenario);

/// Header `scenario_id,alpha_bound,alpha_used,payment_mc,saving_bound,
/// saving_mc,verdict_always_0,verdict_always_1,verdict_flip,verdict_random_0.5`.
void write_incentives_csv(std::ostream& out, std::span<const IncentiveRow> rows);

}  // namespace infochain
