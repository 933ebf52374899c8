#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace infochain {

using AgentId = std::string;
using QuestionId = std::string;

/// Integer currency units on the simulated chain.
using Units = std::int64_t;

/// Fixed-point scale: integer units per mechanism unit.
inline constexpr Units kUnitScale = 1'000'000'000;

/// Party name used for requester-attributed gas and transfers.
inline constexpr std::string_view kRequesterParty = "requester";

enum class Phase { Posting, Selection, Commit, Reveal, Settled };

enum class Mechanism { OutputAgreement, DasguptaGhosh, Ptsc };

std::string_view to_string(Phase phase);
std::string_view to_string(Mechanism mechanism);

/// Accepts the short CLI names "oa", "dg", "ptsc" (case-insensitive).
Mechanism parse_mechanism(std::string_view name);

/// Identifiers must be non-empty and free of separators used by the
/// CSV and event-log formats (comma, whitespace, control characters).
bool is_valid_identifier(std::string_view id);

}  // namespace infochain
