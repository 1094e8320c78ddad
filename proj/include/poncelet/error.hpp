#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace poncelet {

/// Failure categories raised by the geometry layer. The CLI maps every one of
/// these to exit code 2 (construction failure).
enum class Errc {
  ZeroVector,
  CoincidentPoints,
  CoincidentLines,
  SingularMap,
  DegenerateQuadruple,
  SizeMismatch,
  InvalidPolygon,
  DegenerateInput,
  SingularDual,
  PointNotOnConic,
  LineNotTangent,
  DegenerateConic,
  OutOfRange,
  NoRealRoot,
  PointInsideConic,
  AmbiguousOrientation,
  BracketFailure,
  NoConvergence,
  ClosureFailure,
  EvenN,
  NearParallelLines,
  IndexOutOfRange,
  FitFailure,
  NotConfocal,
  NoSignMatches,
  DegenerateQuad,
  NonConvexCell,
  BadK,
  DegenerateDiagonals,
  NotCircumscribed,
  MissingConic,
  MatchFailure,
  MissingLabel,
  SchemaError,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::CoincidentLines: return "CoincidentLines";
    case Errc::SingularMap: return "SingularMap";
    case Errc::DegenerateQuadruple: return "DegenerateQuadruple";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::InvalidPolygon: return "InvalidPolygon";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::SingularDual: return "SingularDual";
    case Errc::PointNotOnConic: return "PointNotOnConic";
    case Errc::LineNotTangent: return "LineNotTangent";
    case Errc::DegenerateConic: return "DegenerateConic";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::NoRealRoot: return "NoRealRoot";
    case Errc::PointInsideConic: return "PointInsideConic";
    case Errc::AmbiguousOrientation: return "AmbiguousOrientation";
    case Errc::BracketFailure: return "BracketFailure";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ClosureFailure: return "ClosureFailure";
    case Errc::EvenN: return "EvenN";
    case Errc::NearParallelLines: return "NearParallelLines";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::FitFailure: return "FitFailure";
    case Errc::NotConfocal: return "NotConfocal";
    case Errc::NoSignMatches: return "NoSignMatches";
    case Errc::DegenerateQuad: return "DegenerateQuad";
    case Errc::NonConvexCell: return "NonConvexCell";
    case Errc::BadK: return "BadK";
    case Errc::DegenerateDiagonals: return "DegenerateDiagonals";
    case Errc::NotCircumscribed: return "NotCircumscribed";
    case Errc::MissingConic: return "MissingConic";
    case Errc::MatchFailure: return "MatchFailure";
    case Errc::MissingLabel: return "MissingLabel";
    case Errc::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

class GeometryError : public std::runtime_error {
 public:
  GeometryError(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw GeometryError(code, what);
}

}  // namespace poncelet
