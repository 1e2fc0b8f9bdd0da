#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace odml {

enum class ErrorKind {
  InvalidInput,
  NumericalFailure,
  DomainError,
  NotPSD,
  Singular,
  InvalidBatch,
  ParseError,
  InvalidDataset,
  EmptySelection,
  DegenerateMeans,
  BoundInapplicable,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// front ends can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  /// 1-based line number for ParseError, if known.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

}  // namespace odml
