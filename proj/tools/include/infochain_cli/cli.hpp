#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "infochain/types.hpp"

namespace infochain::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

struct RunConfig {
  std::string subcommand;
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> gas_table;
  std::optional<std::filesystem::path> scenario;
  Mechanism mechanism = Mechanism::OutputAgreement;
  /// Decimal, fraction or "auto"; "auto" is only meaningful for incentives.
  std::optional<std::string> alpha;
  /// Empty means all peers.
  std::optional<std::size_t> peers;
  bool pack = true;
  std::size_t agents = 50;
  std::size_t questions = 50;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
};

/// Runs one protocol round and writes settlement.csv, gas.csv and events.log.
int cmd_round(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Writes fig2a_packing.csv, fig2b_reward_paths.csv, fig2c_mechanisms.csv
/// and fig2d_peers.csv.
int cmd_gas_bench(const RunConfig& config, std::ostream& out, std::ostream& err);
/// Writes incentives.csv for every scenario in the scenario file.
int cmd_incentives(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace infochain::cli
