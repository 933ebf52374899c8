#include "infochain/error.hpp"

namespace infochain {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidIdentifier: return "InvalidIdentifier";
    case Errc::DuplicateIdentifier: return "DuplicateIdentifier";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::DuplicateAnswer: return "DuplicateAnswer";
    case Errc::UnknownAgent: return "UnknownAgent";
    case Errc::NoNonCommonQuestions: return "NoNonCommonQuestions";
    case Errc::TooManyAnswers: return "TooManyAnswers";
    case Errc::UnknownQuestion: return "UnknownQuestion";
    case Errc::WrongPhase: return "WrongPhase";
    case Errc::ZeroBudget: return "ZeroBudget";
    case Errc::InsufficientDeposit: return "InsufficientDeposit";
    case Errc::DuplicateCommitment: return "DuplicateCommitment";
    case Errc::UnregisteredAgent: return "UnregisteredAgent";
    case Errc::NoCommitment: return "NoCommitment";
    case Errc::AlreadyRevealed: return "AlreadyRevealed";
    case Errc::ReplayMismatch: return "ReplayMismatch";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::DrawBudgetExceeded: return "DrawBudgetExceeded";
    case Errc::UnknownOpKind: return "UnknownOpKind";
    case Errc::InvalidGasTable: return "InvalidGasTable";
    case Errc::DegeneratePrior: return "DegeneratePrior";
    case Errc::NonPositiveBeta: return "NonPositiveBeta";
    case Errc::AlphaTooSmall: return "AlphaTooSmall";
    case Errc::NoSolution: return "NoSolution";
    case Errc::EmptyDataset: return "EmptyDataset";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

}  // namespace infochain
