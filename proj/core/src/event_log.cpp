#include "infochain/event_log.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "infochain/error.hpp"

namespace infochain {

namespace {

constexpr std::array<std::pair<EventType, std::string_view>, 8> kNames = {{
    {EventType::Configure, "Configure"},
    {EventType::PostQuestions, "PostQuestions"},
    {EventType::SelectQuestions, "SelectQuestions"},
    {EventType::CloseSelection, "CloseSelection"},
    {EventType::SubmitCommitment, "SubmitCommitment"},
    {EventType::Reveal, "Reveal"},
    {EventType::AdvanceBlocks, "AdvanceBlocks"},
    {EventType::Settle, "Settle"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(EventType type) {
  for (const auto& [t, name] : kNames) {
    if (t == type) return name;
  }
  return "Unknown";
}

EventType parse_event_type(std::string_view name) {
  for (const auto& [t, n] : kNames) {
    if (n == name) return t;
  }
  throw Error(Errc::ParseError, "unknown event type '" + std::string(name) + "'");
}

std::string format_event(const Event& event) {
  return fmt::format("{}, {}, {}, {}", event.block, to_string(event.type), event.party, to_hex(event.payload));
}

Event parse_event(std::string_view line) {
  std::array<std::string_view, 4> fields;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto comma = line.find(',');
    if (i < 3 && comma == std::string_view::npos) {
      throw Error(Errc::ParseError, "event line needs 4 fields: " + std::string(line));
    }
    fields[i] = trim(i < 3 ? line.substr(0, comma) : line);
    if (i < 3) line.remove_prefix(comma + 1);
  }
  if (fields[3].find(',') != std::string_view::npos) {
    throw Error(Errc::ParseError, "event line has more than 4 fields");
  }
  Event event;
  const auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), event.block);
  if (ec != std::errc{} || ptr != fields[0].data() + fields[0].size()) {
    throw Error(Errc::ParseError, "bad block number '" + std::string(fields[0]) + "'");
  }
  event.type = parse_event_type(fields[1]);
  event.party = std::string(fields[2]);
  event.payload = from_hex(fields[3]);
  return event;
}

std::string format_event_log(std::span<const Event> events) {
  std::string out;
  for (const auto& e : events) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

std::vector<Event> parse_event_log(std::string_view text) {
  std::vector<Event> out;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(parse_event(line));
  }
  return out;
}

}  // namespace infochain
