#pragma once

#include <stdexcept>
#include <string>

namespace sectorkit {

enum class ErrorKind {
  ChartMismatch,
  CrossSlice,
  EmptyFamily,
  NotClosed,
  DisjointnessUnavailable,
  InvariantViolation,
  UnknownElement,
  Disconnected,
  IndexOutOfRange,
  EndpointMismatch,
  UnknownSymmetry,
  SupportViolation,
  NotAProjection,
  InvalidPath,
  ShapeMismatch,
  WitnessInvalid,
  BorchersUnavailable,
  NetMismatch,
  NoDisjointTargets,
  NotSimple,
  PathDependent,
  PosetUnsuitable,
  NoCommonDisjoint,
  AxiomsFail,
  ConfigInvalid,
  ParseError,
};

const char* to_string(ErrorKind k);

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& what)
      : std::runtime_error(std::string(to_string(k)) + ": " + what), kind(k) {}
};

}  // namespace sectorkit
