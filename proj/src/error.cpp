#include "odml/error.hpp"

namespace odml {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::InvalidBatch: return "InvalidBatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidDataset: return "InvalidDataset";
    case ErrorKind::EmptySelection: return "EmptySelection";
    case ErrorKind::DegenerateMeans: return "DegenerateMeans";
    case ErrorKind::BoundInapplicable: return "BoundInapplicable";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message,
                     std::optional<std::size_t> line) {
  std::string out(to_string(kind));
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(decorate(kind, message, line)), kind_(kind), line_(line) {}

}  // namespace odml
