#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "infochain/types.hpp"

namespace infochain {

/// Sparse agent x question binary reports. An absent cell means the agent
/// did not answer (or did not select) the question.
class AnswerMatrix {
 public:
  AnswerMatrix() = default;

  /// Throws InvalidIdentifier or DuplicateIdentifier.
  AnswerMatrix(std::vector<AgentId> agents, std::vector<QuestionId> questions);

  std::size_t agent_count() const { return agents_.size(); }
  std::size_t question_count() const { return questions_.size(); }
  const std::vector<AgentId>& agents() const { return agents_; }
  const std::vector<QuestionId>& questions() const { return questions_; }

  std::optional<std::size_t> agent_index(const AgentId& id) const;
  std::optional<std::size_t> question_index(const QuestionId& id) const;
  /// Throw UnknownAgent / UnknownQuestion.
  std::size_t require_agent(const AgentId& id) const;
  std::size_t require_question(const QuestionId& id) const;

  /// Throws DuplicateAnswer when the cell already holds a value.
  void set(std::size_t agent, std::size_t question, bool value);
  void set(const AgentId& agent, const QuestionId& question, bool value);

  std::optional<bool> get(std::size_t agent, std::size_t question) const;
  bool answered(std::size_t agent, std::size_t question) const {
    return cells_[agent * questions_.size() + question] >= 0;
  }
  bool value(std::size_t agent, std::size_t question) const {
    return cells_[agent * questions_.size() + question] == 1;
  }

  std::size_t answer_count() const { return answers_; }

  /// Ascending question indices answered by `agent`.
  std::vector<std::size_t> questions_of(std::size_t agent) const;
  /// Ascending agent indices that answered `question`.
  std::vector<std::size_t> answerers_of(std::size_t question) const;

  friend bool operator==(const AnswerMatrix& a, const AnswerMatrix& b) {
    return a.agents_ == b.agents_ && a.questions_ == b.questions_ && a.cells_ == b.cells_;
  }

 private:
  std::vector<AgentId> agents_;
  std::vector<QuestionId> questions_;
  std::unordered_map<AgentId, std::size_t> agent_index_;
  std::unordered_map<QuestionId, std::size_t> question_index_;
  std::vector<std::int8_t> cells_;  // -1 absent, else 0/1
  std::size_t answers_ = 0;
};

}  // namespace infochain
