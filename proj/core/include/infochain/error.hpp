#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infochain {

enum class Errc {
  InvalidArgument,
  InvalidIdentifier,
  DuplicateIdentifier,
  ParseError,
  IoError,
  // mechanisms
  EmptyMatrix,
  DuplicateAnswer,
  UnknownAgent,
  NoNonCommonQuestions,
  // commitment
  TooManyAnswers,
  UnknownQuestion,
  // ledger
  WrongPhase,
  ZeroBudget,
  InsufficientDeposit,
  DuplicateCommitment,
  UnregisteredAgent,
  NoCommitment,
  AlreadyRevealed,
  ReplayMismatch,
  // peer selection
  KTooLarge,
  DrawBudgetExceeded,
  // gas model
  UnknownOpKind,
  InvalidGasTable,
  // incentives
  DegeneratePrior,
  NonPositiveBeta,
  AlphaTooSmall,
  NoSolution,
  // sim
  EmptyDataset,
};

std::string_view to_string(Errc code);

/// All domain failures surface as this exception. `what()` starts with the
/// error-code name so command-line diagnostics name the failing condition.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace infochain
