#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "infochain/answer_matrix.hpp"
#include "infochain/error.hpp"

namespace infochain::testing {

/// Rows separated by '/', one char per question: '0', '1' or '-'.
/// Agents are a0.., questions q0...
inline AnswerMatrix matrix_from_text(std::string_view text) {
  std::vector<std::string> rows;
  std::string row;
  for (char ch : text) {
    if (ch == '/') {
      rows.push_back(row);
      row.clear();
    } else {
      row.push_back(ch);
    }
  }
  rows.push_back(row);
  std::vector<AgentId> agents;
  std::vector<QuestionId> questions;
  for (std::size_t a = 0; a < rows.size(); ++a) agents.push_back(fmt::format("a{}", a));
  for (std::size_t q = 0; q < rows.front().size(); ++q) questions.push_back(fmt::format("q{}", q));
  AnswerMatrix m(agents, questions);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a].size() != questions.size()) throw Error(Errc::ParseError, "ragged matrix text");
    for (std::size_t q = 0; q < questions.size(); ++q) {
      if (rows[a][q] != '-') m.set(a, q, rows[a][q] == '1');
    }
  }
  return m;
}

}  // namespace infochain::testing
