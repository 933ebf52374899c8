#include "infochain/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "infochain/error.hpp"

namespace infochain {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Posting: return "Posting";
    case Phase::Selection: return "Selection";
    case Phase::Commit: return "Commit";
    case Phase::Reveal: return "Reveal";
    case Phase::Settled: return "Settled";
  }
  return "Unknown";
}

std::string_view to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::OutputAgreement: return "OA";
    case Mechanism::DasguptaGhosh: return "DG";
    case Mechanism::Ptsc: return "PTSC";
  }
  return "Unknown";
}

Mechanism parse_mechanism(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "oa") return Mechanism::OutputAgreement;
  if (lower == "dg") return Mechanism::DasguptaGhosh;
  if (lower == "ptsc") return Mechanism::Ptsc;
  throw Error(Errc::ParseError, "unknown mechanism '" + std::string(name) + "'");
}

bool is_valid_identifier(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](unsigned char c) {
    return c == ',' || std::isspace(c) || std::iscntrl(c);
  });
}

}  // namespace infochain
