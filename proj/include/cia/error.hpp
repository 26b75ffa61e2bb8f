#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cia {

enum class Errc {
  DegenerateLattice,
  NotUnimodular,
  InvalidScale,
  NotOrthogonal,
  InvalidSet,
  DimensionMismatch,
  InvalidK,
  InsufficientShellRadius,
  InfeasibleLabels,
  EmptyBlock,
  InvalidPartition,
  NotFiniteBlock,
  EpsilonTooLarge,
  MalformedCif,
  BadSymOp,
  EmptyStructure,
  CoincidentPoints,
  ParseError,
  InternalInvariant,
};

std::string_view errcName(Errc code);

/// Library-wide exception. The code identifies the failure class so callers
/// (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errcName(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

inline std::string_view errcName(Errc code) {
  switch (code) {
    case Errc::DegenerateLattice: return "DegenerateLattice";
    case Errc::NotUnimodular: return "NotUnimodular";
    case Errc::InvalidScale: return "InvalidScale";
    case Errc::NotOrthogonal: return "NotOrthogonal";
    case Errc::InvalidSet: return "InvalidSet";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidK: return "InvalidK";
    case Errc::InsufficientShellRadius: return "InsufficientShellRadius";
    case Errc::InfeasibleLabels: return "InfeasibleLabels";
    case Errc::EmptyBlock: return "EmptyBlock";
    case Errc::InvalidPartition: return "InvalidPartition";
    case Errc::NotFiniteBlock: return "NotFiniteBlock";
    case Errc::EpsilonTooLarge: return "EpsilonTooLarge";
    case Errc::MalformedCif: return "MalformedCif";
    case Errc::BadSymOp: return "BadSymOp";
    case Errc::EmptyStructure: return "EmptyStructure";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::ParseError: return "ParseError";
    case Errc::InternalInvariant: return "InternalInvariant";
  }
  return "Unknown";
}

}  // namespace cia
