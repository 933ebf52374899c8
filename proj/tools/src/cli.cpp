#include "infochain_cli/cli.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "infochain/config_file.hpp"
#include "infochain/error.hpp"
#include "infochain/event_log.hpp"
#include "infochain/gas_model.hpp"
#include "infochain/incentives.hpp"
#include "infochain/rational.hpp"
#include "infochain/sim.hpp"

namespace infochain::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::ParseError || e.code() == Errc::IoError ? kUsageError : kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
}

GasTable gas_table(const RunConfig& c) { return c.gas_table ? GasTable::load(*c.gas_table) : GasTable{}; }

Rational round_alpha(const RunConfig& c) {
  if (!c.alpha) return Rational(1);
  if (*c.alpha == "auto") throw UsageError("--alpha auto is only available for the incentives subcommand");
  try {
    return parse_rational(*c.alpha);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct Inputs {
  QoSDataset dataset;
  ExperimentConfig base;
};

Inputs prepare(const RunConfig& c) {
  if (c.agents < 2 || c.questions < 1) throw UsageError("need at least 2 agents and 1 question");
  Inputs in;
  in.base.seed = c.seed.value_or(1);
  if (c.dataset) {
    in.dataset = QoSDataset::load(*c.dataset);
    in.base.agents = std::min(c.agents, in.dataset.rows());
    in.base.questions = std::min(c.questions, in.dataset.cols());
  } else {
    in.dataset = synthesize_dataset(c.agents, c.questions, in.base.seed);
    in.base.agents = c.agents;
    in.base.questions = c.questions;
  }
  in.base.mechanism = c.mechanism;
  in.base.alpha = round_alpha(c);
  in.base.sample_k = c.peers;
  in.base.packing = c.pack;
  in.base.gas = gas_table(c);
  return in;
}

void write_output(const std::filesystem::path& dir, const std::string& name, const std::string& contents) {
  std::filesystem::create_directories(dir);
  write_file_atomically(dir / name, contents);
}

template <typename Writer>
std::string render(Writer&& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

std::string mean_or_dash(const ExperimentReport& r, Behavior b) {
  const auto m = r.mean_reward(b);
  return m ? to_decimal(*m, 6) : "-";
}

}  // namespace

int cmd_round(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Inputs in = prepare(c);
    in.base.id = "round";
    const ExperimentReport r = run_experiment(in.dataset, in.base);

    write_output(c.out, "settlement.csv", render([&](std::ostream& s) { write_settlement_csv(s, r.settlement); }));
    write_output(c.out, "gas.csv", render([&](std::ostream& s) { write_gas_report_csv(s, r.gas); }));
    write_output(c.out, "events.log", format_event_log(r.events));

    out << fmt::format("{} round: {} agents, {} questions, peers {}, packing {}\n", to_string(c.mechanism),
                       in.base.agents, in.base.questions, c.peers ? std::to_string(*c.peers) : "all",
                       c.pack ? "on" : "off");
    for (Phase p : {Phase::Posting, Phase::Selection, Phase::Commit, Phase::Reveal, Phase::Settled}) {
      out << fmt::format("  gas {:<10} {}\n", to_string(p), r.phase_gas(p));
    }
    out << fmt::format("  gas total      {}\n", r.gas.total);
    out << fmt::format("  mean reward    truthful {}  random {}  adversarial {}\n",
                       mean_or_dash(r, Behavior::Truthful), mean_or_dash(r, Behavior::Random),
                       mean_or_dash(r, Behavior::Adversarial));
    out << fmt::format("  paid {} of budget {}, requester refund {}\n", r.settlement.total_payments(),
                       r.settlement.budget, r.settlement.requester_refund);
    for (const auto& line : r.settlement.audit_log) out << "  note: " << line << '\n';
    out << "wrote " << (c.out / "settlement.csv").string() << ", " << (c.out / "gas.csv").string() << ", "
        << (c.out / "events.log").string() << '\n';
    return int(kOk);
  });
}

int cmd_gas_bench(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Inputs in = prepare(c);
    in.base.id = "bench";

    std::size_t max_answered = in.base.questions;
    {
      const AnswerMatrix truth = binarize(in.dataset.submatrix(in.base.agents, in.base.questions));
      for (std::size_t a = 0; a < truth.agent_count(); ++a) {
        max_answered = std::min(max_answered, truth.questions_of(a).size());
      }
    }

    ExperimentConfig packing = in.base;
    packing.mechanism = Mechanism::OutputAgreement;
    packing.sample_k.reset();
    const auto fig2a = sweep_packing(in.dataset, packing, max_answered);
    write_output(c.out, "fig2a_packing.csv", render([&](std::ostream& s) { write_experiment_csv(s, fig2a); }));

    ExperimentConfig all_peers = in.base;
    all_peers.sample_k.reset();
    const auto fig2b = sweep_reward_paths(in.dataset, all_peers);
    write_output(c.out, "fig2b_reward_paths.csv", render([&](std::ostream& s) { write_experiment_csv(s, fig2b); }));

    const auto fig2c = sweep_mechanisms(in.dataset, all_peers);
    write_output(c.out, "fig2c_mechanisms.csv", render([&](std::ostream& s) { write_experiment_csv(s, fig2c); }));

    ExperimentConfig dg = all_peers;
    dg.mechanism = Mechanism::DasguptaGhosh;
    const auto fig2d = sweep_peers(in.dataset, dg, in.base.agents - 1);
    write_output(c.out, "fig2d_peers.csv", render([&](std::ostream& s) { write_experiment_csv(s, fig2d); }));

    const std::size_t half = fig2a.size() / 2;
    out << fmt::format("writing gas per agent (packed / unpacked), {} agents:\n", in.base.agents);
    for (std::size_t i = 0; i < half; ++i) {
      const std::size_t q = i + 1;
      if (q <= 2 || q == 42 || q == 43 || q == half) {
        out << fmt::format("  {:>3} questions  {:>10.0f} {:>10.0f}\n", q, fig2a[i].writing_gas_per_agent(),
                           fig2a[half + i].writing_gas_per_agent());
      }
    }
    out << "settlement gas, optimized vs naive:\n";
    for (std::size_t i = 0; i + 1 < fig2b.size(); i += 2) {
      out << fmt::format("  {:<5} {:>14} {:>14}\n", to_string(fig2b[i].config.mechanism),
                         fig2b[i].phase_gas(Phase::Settled), fig2b[i + 1].phase_gas(Phase::Settled));
    }
    out << "settlement gas by mechanism:\n";
    for (const auto& r : fig2c) {
      out << fmt::format("  {:<5} {:>14}\n", to_string(r.config.mechanism), r.phase_gas(Phase::Settled));
    }
    out << "DG settlement gas by sampled peers:\n";
    for (const auto& r : fig2d) {
      const std::size_t k = r.config.sample_k.value_or(0);
      if (k <= 3 || k % 8 == 0 || k + 1 == in.base.agents) {
        out << fmt::format("  {:>4} {:>14}\n", k == 0 ? std::string("all") : std::to_string(k),
                           r.phase_gas(Phase::Settled));
      }
    }
    out << "wrote fig2a-fig2d CSVs to " << c.out.string() << '\n';
    return int(kOk);
  });
}

int cmd_incentives(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!c.scenario) throw UsageError("incentives needs --scenario PATH");
    std::optional<Rational> alpha;
    if (c.alpha && *c.alpha != "auto") {
      try {
        alpha = parse_rational(*c.alpha);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    auto scenarios = load_scenarios(*c.scenario, alpha);
    std::vector<IncentiveRow> rows;
    for (auto& s : scenarios) {
      if (c.seed) s.mc.seed = *c.seed;
      rows.push_back(evaluate_scenario(s));
      const IncentiveRow& r = rows.back();
      out << fmt::format("{}: n={} alpha_bound={} alpha={} payment_mc={:.6f}+-{:.6f} saving_bound={} "
                         "saving_mc={:.6f}\n",
                         r.scenario_id, s.n, to_decimal(r.alpha_bound, 6), to_decimal(r.alpha_used, 6),
                         r.payment.mean, r.payment.std_error, to_decimal(r.saving_bound, 6), r.saving.mean);
      for (const auto& [d, result] : r.verdicts) {
        if (result) {
          out << fmt::format("  {:<10} {} (difference {:.6f} +- {:.6f})\n", d.name(), to_string(result->verdict),
                             result->difference.mean, result->difference.std_error);
        } else {
          out << fmt::format("  {:<10} alpha_too_small\n", d.name());
        }
      }
    }
    write_output(c.out, "incentives.csv", render([&](std::ostream& s) { write_incentives_csv(s, rows); }));
    out << "wrote " << (c.out / "incentives.csv").string() << '\n';
    return int(kOk);
  });
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Peer-consistency oracle simulator"};
  app.require_subcommand(1);
  RunConfig config;
  std::string mechanism = "oa";
  std::string peers = "all";
  std::string pack = "on";
  std::string dataset, gas, scenario;

  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--dataset", dataset, "Response-time matrix (-1 marks missing cells)")->check(CLI::ExistingFile);
    sub->add_option("--gas-table", gas, "Gas table (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--scenario", scenario, "Incentive scenario file")->check(CLI::ExistingFile);
    sub->add_option("--mechanism", mechanism, "oa, dg or ptsc")->check(CLI::IsMember({"oa", "dg", "ptsc"}));
    sub->add_option_function<std::string>("--alpha", [&](const std::string& v) { config.alpha = v; },
                                          "PTSC scaling constant, or auto");
    sub->add_option("--peers", peers, "all or a peer count K");
    sub->add_option("--pack", pack, "on or off")->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--agents", config.agents, "Agents (dataset rows)");
    sub->add_option("--questions", config.questions, "Questions (dataset columns)");
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { config.seed = v; }, "Seed");
    sub->add_option("--out", config.out, "Output directory");
  };
  CLI::App* round = app.add_subcommand("round", "Run one post/select/commit/reveal/settle round");
  CLI::App* bench = app.add_subcommand("gas-bench", "Sweep packing, reward paths, mechanisms and peer counts");
  CLI::App* incentives = app.add_subcommand("incentives", "Evaluate outside-incentive scenarios");
  for (CLI::App* sub : {round, bench, incentives}) add_flags(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    app.exit(e, out, msg);
    err << msg.str();
    return e.get_exit_code() == 0 ? kOk : kUsageError;
  }

  config.mechanism = parse_mechanism(mechanism);
  config.pack = pack == "on";
  if (peers != "all") {
    std::size_t used = 0;
    unsigned long long k = 0;
    try {
      k = std::stoull(peers, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != peers.size() || k == 0 || peers.front() == '-') {
      err << "usage error: --peers expects 'all' or a positive integer\n";
      return kUsageError;
    }
    config.peers = static_cast<std::size_t>(k);
  }
  if (!dataset.empty()) config.dataset = dataset;
  if (!gas.empty()) config.gas_table = gas;
  if (!scenario.empty()) config.scenario = scenario;

  if (round->parsed()) {
    config.subcommand = "round";
    return cmd_round(config, out, err);
  }
  if (bench->parsed()) {
    config.subcommand = "gas-bench";
    return cmd_gas_bench(config, out, err);
  }
  config.subcommand = "incentives";
  return cmd_incentives(config, out, err);
}

}  // namespace infochain::cli
