#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infochain/bytes.hpp"

namespace infochain {

enum class EventType {
  Configure,
  PostQuestions,
  SelectQuestions,
  CloseSelection,
  SubmitCommitment,
  Reveal,
  AdvanceBlocks,
  Settle,
};

std::string_view to_string(EventType type);
EventType parse_event_type(std::string_view name);

/// One ledger input. Text form: `block_number, event_type, party, payload_hex`.
struct Event {
  std::uint64_t block = 0;
  EventType type = EventType::Configure;
  std::string party;
  Bytes payload;

  friend bool operator==(const Event&, const Event&) = default;
};

std::string format_event(const Event& event);
Event parse_event(std::string_view line);

/// One event per line, trailing newline after each.
std::string format_event_log(std::span<const Event> events);
/// Skips blank lines and lines starting with '#'.
std::vector<Event> parse_event_log(std::string_view text);

}  // namespace infochain
