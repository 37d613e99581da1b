#include "sectorkit/error.hpp"

namespace sectorkit {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ChartMismatch: return "ChartMismatch";
    case ErrorKind::CrossSlice: return "CrossSlice";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::DisjointnessUnavailable: return "DisjointnessUnavailable";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::EndpointMismatch: return "EndpointMismatch";
    case ErrorKind::UnknownSymmetry: return "UnknownSymmetry";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::NotAProjection: return "NotAProjection";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::WitnessInvalid: return "WitnessInvalid";
    case ErrorKind::BorchersUnavailable: return "BorchersUnavailable";
    case ErrorKind::NetMismatch: return "NetMismatch";
    case ErrorKind::NoDisjointTargets: return "NoDisjointTargets";
    case ErrorKind::NotSimple: return "NotSimple";
    case ErrorKind::PathDependent: return "PathDependent";
    case ErrorKind::PosetUnsuitable: return "PosetUnsuitable";
    case ErrorKind::NoCommonDisjoint: return "NoCommonDisjoint";
    case ErrorKind::AxiomsFail: return "AxiomsFail";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace sectorkit
