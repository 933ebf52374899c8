#include "infochain/answer_matrix.hpp"

#include "infochain/error.hpp"

namespace infochain {

namespace {

template <class Map>
void index_ids(const std::vector<std::string>& ids, Map& index, std::string_view what) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!is_valid_identifier(ids[i])) {
      throw Error(Errc::InvalidIdentifier, std::string(what) + " id '" + ids[i] + "'");
    }
    if (!index.emplace(ids[i], i).second) {
      throw Error(Errc::DuplicateIdentifier, std::string(what) + " id '" + ids[i] + "'");
    }
  }
}

}  // namespace

AnswerMatrix::AnswerMatrix(std::vector<AgentId> agents, std::vector<QuestionId> questions)
    : agents_(std::move(agents)), questions_(std::move(questions)) {
  index_ids(agents_, agent_index_, "agent");
  index_ids(questions_, question_index_, "question");
  cells_.assign(agents_.size() * questions_.size(), -1);
}

std::optional<std::size_t> AnswerMatrix::agent_index(const AgentId& id) const {
  auto it = agent_index_.find(id);
  if (it == agent_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> AnswerMatrix::question_index(const QuestionId& id) const {
  auto it = question_index_.find(id);
  if (it == question_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AnswerMatrix::require_agent(const AgentId& id) const {
  if (auto i = agent_index(id)) return *i;
  throw Error(Errc::UnknownAgent, "'" + id + "'");
}

std::size_t AnswerMatrix::require_question(const QuestionId& id) const {
  if (auto q = question_index(id)) return *q;
  throw Error(Errc::UnknownQuestion, "'" + id + "'");
}

void AnswerMatrix::set(std::size_t agent, std::size_t question, bool value) {
  if (agent >= agents_.size() || question >= questions_.size()) {
    throw Error(Errc::InvalidArgument, "cell index out of range");
  }
  auto& cell = cells_[agent * questions_.size() + question];
  if (cell >= 0) {
    throw Error(Errc::DuplicateAnswer,
                "agent '" + agents_[agent] + "' already answered '" + questions_[question] + "'");
  }
  cell = value ? 1 : 0;
  ++answers_;
}

void AnswerMatrix::set(const AgentId& agent, const QuestionId& question, bool value) {
  set(require_agent(agent), require_question(question), value);
}

std::optional<bool> AnswerMatrix::get(std::size_t agent, std::size_t question) const {
  if (!answered(agent, question)) return std::nullopt;
  return value(agent, question);
}

std::vector<std::size_t> AnswerMatrix::questions_of(std::size_t agent) const {
  std::vector<std::size_t> out;
  for (std::size_t q = 0; q < questions_.size(); ++q) {
    if (answered(agent, q)) out.push_back(q);
  }
  return out;
}

std::vector<std::size_t> AnswerMatrix::answerers_of(std::size_t question) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < agents_.size(); ++a) {
    if (answered(a, question)) out.push_back(a);
  }
  return out;
}

}  // namespace infochain
