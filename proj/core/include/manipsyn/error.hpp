#pragma once

#include <stdexcept>
#include <string>

namespace manipsyn {

enum class ErrorCode {
  DisconnectedGraph,
  UnknownLink,
  InvalidActuationSelector,
  DuplicateJointId,
  NonSquareA2,
  SingularA2,
  SingularConfiguration,
  AllPrismatic,
  SerialTopology,
  DimensionMismatch,
  EmptyCatalog,
  ExhaustedRestarts,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Library error carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace manipsyn
