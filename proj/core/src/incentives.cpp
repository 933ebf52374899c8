#include "infochain/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "infochain/config_file.hpp"
#include "infochain/error.hpp"

namespace infochain {

AgentBelief AgentBelief::exchangeable(const Rational& prior_1, const Rational& post_1_given_1) {
  if (prior_1 <= 0 || prior_1 >= 1) throw Error(Errc::DegeneratePrior, "prior must lie strictly between 0 and 1");
  AgentBelief b;
  b.prior_1 = prior_1;
  b.post_1_given_1 = post_1_given_1;
  b.post_0_given_1 = 1 - post_1_given_1;
  const Rational both_zero = 1 - 2 * prior_1 + prior_1 * post_1_given_1;
  b.post_0_given_0 = both_zero / (1 - prior_1);
  return b;
}

BeliefModel BeliefModel::uniform(const AgentBelief& belief, std::size_t n) {
  return BeliefModel{std::vector<AgentBelief>(n, belief)};
}

void BeliefModel::validate() const {
  if (agents.empty()) throw Error(Errc::InvalidArgument, "belief model has no agents");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentBelief& b = agents[i];
    if (b.prior_1 <= 0 || b.prior_1 >= 1) {
      throw Error(Errc::DegeneratePrior, fmt::format("agent {} prior {} is not fully mixed", i, to_decimal(b.prior_1)));
    }
    for (const Rational* p : {&b.post_1_given_1, &b.post_0_given_1, &b.post_0_given_0}) {
      if (*p < 0 || *p > 1) throw Error(Errc::InvalidArgument, fmt::format("agent {} posterior outside [0, 1]", i));
    }
    if (b.post_1_given_1 + b.post_0_given_1 != 1) {
      throw Error(Errc::InvalidArgument, fmt::format("agent {} posteriors given 1 do not sum to 1", i));
    }
  }
}

Rational beta(const BeliefModel& model) {
  model.validate();
  std::optional<Rational> result;
  for (const auto& b : model.agents) {
    const Rational v = b.post_1_given_1 / b.prior_1 - b.post_0_given_1 / (1 - b.prior_1);
    if (!result || v < *result) result = v;
  }
  return *result;
}

Rational gamma(const BeliefModel& model) {
  model.validate();
  Rational result = 0;
  for (const auto& b : model.agents) result = std::max(result, b.post_0_given_1);
  return result;
}

Rational alpha_bound(std::size_t n, const Rational& c, const BeliefModel& model) {
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be positive");
  const Rational b = beta(model);
  if (b <= 0) throw Error(Errc::NonPositiveBeta, fmt::format("beta = {} must be positive", to_decimal(b)));
  return c * (1 + Rational(n - 1) * gamma(model)) / (Rational(n) * b);
}

GenerativeWorld calibrate_world(double prior_1, double post_1_given_1) {
  if (!(prior_1 > 0 && prior_1 < 1) || !(post_1_given_1 > 0 && post_1_given_1 <= 1)) {
    throw Error(Errc::NoSolution, "probabilities must lie in (0, 1)");
  }
  if (post_1_given_1 < prior_1) {
    throw Error(Errc::NoSolution, "a symmetric mixture cannot produce negative correlation");
  }
  auto world_at = [&](double h) {
    const double denom = 2 * h - 1;
    const double w = std::abs(denom) < 1e-15 ? 0.5 : (prior_1 + h - 1) / denom;
    return GenerativeWorld{std::clamp(w, 0.0, 1.0), h, 1 - h};
  };
  auto excess = [&](double h) { return world_at(h).post_1_given_1() - post_1_given_1; };

  double lo = std::max(prior_1, 1 - prior_1);
  double hi = 1.0;
  if (excess(lo) >= 0) return world_at(lo);
  if (excess(hi) < 0) throw Error(Errc::NoSolution, "posterior unreachable");
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0 ? lo : hi) = mid;
  }
  return world_at(0.5 * (lo + hi));
}

IncentiveScenario IncentiveScenario::from_beliefs(std::string id, std::size_t n, const Rational& c,
                                                  const Rational& alpha, const Rational& prior_1,
                                                  const Rational& post_1_given_1) {
  IncentiveScenario s;
  s.id = std::move(id);
  s.n = n;
  s.c = c;
  s.alpha = alpha;
  s.prior_1 = prior_1;
  s.beliefs = BeliefModel::uniform(AgentBelief::exchangeable(prior_1, post_1_given_1), n);
  s.beliefs.validate();
  s.world = calibrate_world(to_double(prior_1), to_double(post_1_given_1));
  return s;
}

void IncentiveScenario::validate() const {
  if (n < 2) throw Error(Errc::InvalidArgument, "n must be at least 2");
  if (c <= 0) throw Error(Errc::InvalidArgument, "c must be positive");
  if (alpha <= 0) throw Error(Errc::InvalidArgument, "alpha must be positive");
  if (mc.batch_questions == 0) throw Error(Errc::InvalidArgument, "batch_questions must be positive");
  if (mc.rounds < 2 * mc.batch_questions) throw Error(Errc::InvalidArgument, "rounds must cover at least two batches");
  if (mc.threads == 0) throw Error(Errc::InvalidArgument, "threads must be positive");
}

Rational outcome(std::span<const bool> reports) {
  if (reports.empty()) throw Error(Errc::InvalidArgument, "no reports");
  const auto zeros = std::count(reports.begin(), reports.end(), false);
  return Rational(zeros) / Rational(reports.size());
}

namespace {

// One batch of questions under truthful play.
struct Batch {
  std::size_t n = 0;
  std::size_t questions = 0;
  std::vector<std::uint8_t> x;      // x[q * n + i]
  std::vector<std::size_t> peer;    // peer[q * n + i]
  std::vector<double> freq_one;     // per agent, over everyone else's answers

  bool obs(std::size_t q, std::size_t i) const { return x[q * n + i] != 0; }
  double freq(std::size_t i, bool y) const { return y ? freq_one[i] : 1 - freq_one[i]; }
};

Batch draw_batch(const IncentiveScenario& s, std::uint64_t index) {
  SplitMix64 rng(stream_seed(s.mc.seed, index, 0));
  Batch b;
  b.n = s.n;
  b.questions = s.mc.batch_questions;
  b.x.resize(b.n * b.questions);
  b.peer.resize(b.n * b.questions);
  std::vector<std::uint64_t> ones(b.n, 0);
  std::uint64_t total_ones = 0;
  for (std::size_t q = 0; q < b.questions; ++q) {
    const double emit = rng.uniform() < s.world.w ? s.world.h : s.world.l;
    for (std::size_t i = 0; i < b.n; ++i) {
      const bool v = rng.uniform() < emit;
      b.x[q * b.n + i] = v;
      ones[i] += v;
      total_ones += v;
    }
  }
  for (std::size_t k = 0; k < b.n * b.questions; ++k) {
    const std::size_t i = k % b.n;
    std::size_t p = rng.next() % (b.n - 1);
    if (p >= i) ++p;
    b.peer[k] = p;
  }
  const double others = static_cast<double>((b.n - 1) * b.questions);
  b.freq_one.resize(b.n);
  for (std::size_t i = 0; i < b.n; ++i) b.freq_one[i] = static_cast<double>(total_ones - ones[i]) / others;
  return b;
}

double ptsc(double alpha, bool y, bool peer_y, double freq) {
  if (freq <= 0) return 0;
  return alpha * ((y == peer_y ? 1.0 : 0.0) / freq - 1.0);
}

// Runs `per_batch(index) -> batch mean` over every batch and reduces with
// batch-means standard errors.
template <typename Fn>
Estimate run_batches(const IncentiveScenario& s, Fn per_batch) {
  s.validate();
  const std::uint64_t batches = (s.mc.rounds + s.mc.batch_questions - 1) / s.mc.batch_questions;
  std::vector<double> means(batches);
  const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(s.mc.threads, batches));
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < batches; ++b) means[b] = per_batch(b);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t b = t; b < batches; b += threads) means[b] = per_batch(b);
      });
    }
  }
  double sum = 0;
  for (double m : means) sum += m;
  const double mean = sum / static_cast<double>(batches);
  double ss = 0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double sd = std::sqrt(ss / static_cast<double>(batches - 1));
  return Estimate{mean, sd / std::sqrt(static_cast<double>(batches)), batches * s.mc.batch_questions};
}

bool deviate(const Deviation& d, bool x, SplitMix64& coin) {
  const bool flip_coin = coin.uniform() < d.p;  // always drawn so arms stay paired
  switch (d.kind) {
    case Deviation::Kind::Truthful: return x;
    case Deviation::Kind::AlwaysZero: return false;
    case Deviation::Kind::AlwaysOne: return true;
    case Deviation::Kind::Flip: return !x;
    case Deviation::Kind::Random: return flip_coin;
  }
  return x;
}

}  // namespace

Rational expected_payment_per_agent(const IncentiveScenario& scenario) { return scenario.alpha; }

Estimate payment_monte_carlo(const IncentiveScenario& s) {
  const double alpha = to_double(s.alpha);
  return run_batches(s, [&](std::uint64_t index) {
    const Batch b = draw_batch(s, index);
    double total = 0;
    for (std::size_t q = 0; q < b.questions; ++q) {
      for (std::size_t i = 0; i < b.n; ++i) {
        const bool y = b.obs(q, i);
        total += ptsc(alpha, y, b.obs(q, b.peer[q * b.n + i]), b.freq(i, y));
      }
    }
    return total / static_cast<double>(b.n * b.questions);
  });
}

Rational max_saving(const Rational& p1) {
  if (p1 < 0 || p1 > 1) throw Error(Errc::InvalidArgument, "P(1) must lie in [0, 1]");
  return p1 * (2 - p1);
}

Rational saving_lower_bound(const IncentiveScenario& s) {
  if (s.alpha <= 0 || s.c <= 0) throw Error(Errc::InvalidArgument, "alpha and c must be positive");
  return max_saving(s.prior_1) - s.alpha / s.c;
}

Estimate saving_monte_carlo(const IncentiveScenario& s) {
  const double alpha = to_double(s.alpha);
  const double c = to_double(s.c);
  const double n = static_cast<double>(s.n);
  return run_batches(s, [&](std::uint64_t index) {
    const Batch b = draw_batch(s, index);
    double total = 0;
    for (std::size_t q = 0; q < b.questions; ++q) {
      double ptsc_paid = 0;
      std::size_t zeros = 0;
      for (std::size_t i = 0; i < b.n; ++i) {
        const bool y = b.obs(q, i);
        zeros += !y;
        ptsc_paid += ptsc(alpha, y, b.obs(q, b.peer[q * b.n + i]), b.freq(i, y));
      }
      const double o = static_cast<double>(zeros) / n;
      const double refunds = c * o * static_cast<double>(zeros);
      total += (n * c - ptsc_paid - refunds) / (n * c);
    }
    return total / static_cast<double>(b.questions);
  });
}

std::string Deviation::name() const {
  switch (kind) {
    case Kind::Truthful: return "truthful";
    case Kind::AlwaysZero: return "always_0";
    case Kind::AlwaysOne: return "always_1";
    case Kind::Flip: return "flip";
    case Kind::Random: return fmt::format("random_{}", p);
  }
  return "?";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::StrictlyPositive ? "StrictlyPositive" : "NotSignificant";
}

Estimate utility_difference(const IncentiveScenario& s, const Deviation& deviation) {
  const double alpha = to_double(s.alpha);
  const double c = to_double(s.c);
  const double n = static_cast<double>(s.n);
  return run_batches(s, [&](std::uint64_t index) {
    const Batch b = draw_batch(s, index);
    SplitMix64 coin(stream_seed(s.mc.seed, index, 1));
    double total = 0;
    for (std::size_t q = 0; q < b.questions; ++q) {
      std::size_t other_zeros = 0;
      for (std::size_t i = 1; i < b.n; ++i) other_zeros += !b.obs(q, i);
      const bool x = b.obs(q, 0);
      const bool d = deviate(deviation, x, coin);
      const bool peer_y = b.obs(q, b.peer[q * b.n]);
      auto utility = [&](bool y) {
        const double o = static_cast<double>(other_zeros + !y) / n;
        return ptsc(alpha, y, peer_y, b.freq(0, y)) + (y ? 0.0 : c * o);
      };
      total += utility(x) - utility(d);
    }
    return total / static_cast<double>(b.questions);
  });
}

EquilibriumResult equilibrium_check(const IncentiveScenario& s, const Deviation& deviation) {
  const Rational bound = alpha_bound(s.n, s.c, s.beliefs);
  if (s.alpha <= bound) {
    throw Error(Errc::AlphaTooSmall,
                fmt::format("alpha {} does not exceed the bound {}", to_decimal(s.alpha), to_decimal(bound)));
  }
  EquilibriumResult r;
  r.difference = utility_difference(s, deviation);
  r.verdict = r.difference.mean > 3 * r.difference.std_error ? Verdict::StrictlyPositive : Verdict::NotSignificant;
  return r;
}

std::vector<Deviation> standard_deviations() {
  return {Deviation::always(false), Deviation::always(true), Deviation::flip(), Deviation::random(0.5)};
}

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::ParseError, fmt::format("{} = '{}' is not a nonnegative integer", key, value));
  }
}

std::vector<std::size_t> parse_n_list(const std::string& value) {
  std::vector<std::size_t> out;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(parse_u64("n", item));
  }
  if (out.empty()) throw Error(Errc::ParseError, "n is empty");
  return out;
}

}  // namespace

std::vector<IncentiveScenario> parse_scenarios(std::string_view text, const std::optional<Rational>& alpha_override) {
  std::string id = "scenario";
  std::vector<std::size_t> ns{10};
  Rational c = 1;
  std::optional<Rational> prior;
  std::optional<Rational> posterior;
  std::optional<Rational> bump;
  std::optional<Rational> alpha;
  Rational margin = 2;
  MonteCarloSettings mc;

  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "id") {
      id = value;
    } else if (key == "n") {
      ns = parse_n_list(value);
    } else if (key == "c") {
      c = parse_rational(value);
    } else if (key == "prior_1") {
      prior = parse_rational(value);
    } else if (key == "post_1_given_1") {
      posterior = parse_rational(value);
    } else if (key == "posterior_bump") {
      bump = parse_rational(value);
    } else if (key == "alpha") {
      if (value == "auto") {
        alpha.reset();
      } else {
        alpha = parse_rational(value);
      }
    } else if (key == "alpha_margin") {
      margin = parse_rational(value);
    } else if (key == "rounds") {
      mc.rounds = parse_u64(key, value);
    } else if (key == "batch_questions") {
      mc.batch_questions = parse_u64(key, value);
    } else if (key == "seed") {
      mc.seed = parse_u64(key, value);
    } else if (key == "threads") {
      mc.threads = static_cast<unsigned>(parse_u64(key, value));
    } else {
      throw Error(Errc::ParseError, "unknown scenario key '" + key + "'");
    }
  }
  if (!prior) throw Error(Errc::ParseError, "scenario needs prior_1");
  if (posterior && bump) throw Error(Errc::ParseError, "give either post_1_given_1 or posterior_bump");
  const Rational post = posterior ? *posterior : *prior + bump.value_or(Rational(0));
  if (margin <= 1) throw Error(Errc::ParseError, "alpha_margin must exceed 1");
  if (alpha_override) alpha = alpha_override;

  std::vector<IncentiveScenario> out;
  for (std::size_t n : ns) {
    const std::string sid = ns.size() == 1 ? id : fmt::format("{}-n{}", id, n);
    IncentiveScenario s = IncentiveScenario::from_beliefs(sid, n, c, Rational(1), *prior, post);
    s.alpha = alpha ? *alpha : margin * alpha_bound(n, c, s.beliefs);
    s.mc = mc;
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<IncentiveScenario> load_scenarios(const std::filesystem::path& path,
                                              const std::optional<Rational>& alpha_override) {
  return parse_scenarios(read_text_file(path), alpha_override);
}

IncentiveRow evaluate_scenario(const IncentiveScenario& s) {
  s.validate();
  IncentiveRow row;
  row.scenario_id = s.id;
  row.alpha_bound = alpha_bound(s.n, s.c, s.beliefs);
  row.alpha_used = s.alpha;
  row.payment = payment_monte_carlo(s);
  row.saving_bound = saving_lower_bound(s);
  row.saving = saving_monte_carlo(s);
  for (const auto& d : standard_deviations()) {
    if (s.alpha > row.alpha_bound) {
      row.verdicts.emplace_back(d, equilibrium_check(s, d));
    } else {
      row.verdicts.emplace_back(d, std::nullopt);
    }
  }
  return row;
}

void write_incentives_csv(std::ostream& out, std::span<const IncentiveRow> rows) {
  out << "scenario_id,alpha_bound,alpha_used,payment_mc,saving_bound,saving_mc";
  for (const auto& d : standard_deviations()) out << ",verdict_" << d.name();
  out << '\n';
  for (const auto& row : rows) {
    out << row.scenario_id << ',' << to_decimal(row.alpha_bound) << ',' << to_decimal(row.alpha_used) << ','
        << fmt::format("{:.12g}", row.payment.mean) << ',' << to_decimal(row.saving_bound) << ','
        << fmt::format("{:.12g}", row.saving.mean);
    for (const auto& [_, result] : row.verdicts) {
      out << ',' << (result ? to_string(result->verdict) : std::string_view("alpha_too_small"));
    }
    out << '\n';
  }
}

}  // namespace infochain
