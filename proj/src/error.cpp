#include "camikit/error.hpp"

namespace camikit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::DuplicateId: return "DuplicateId";
  case ErrorCode::MalformedManifest: return "MalformedManifest";
  case ErrorCode::NoHandlerForSuffix: return "NoHandlerForSuffix";
  case ErrorCode::UnknownAction: return "UnknownAction";
  case ErrorCode::KindMismatch: return "KindMismatch";
  case ErrorCode::ParamValidation: return "ParamValidation";
  case ErrorCode::ActionFailure: return "ActionFailure";
  case ErrorCode::UnresolvedBinding: return "UnresolvedBinding";
  case ErrorCode::MalformedPipeline: return "MalformedPipeline";
  case ErrorCode::UnknownId: return "UnknownId";
  case ErrorCode::MissingKey: return "MissingKey";
  case ErrorCode::UnsupportedElementType: return "UnsupportedElementType";
  case ErrorCode::PayloadSizeMismatch: return "PayloadSizeMismatch";
  case ErrorCode::MalformedHeader: return "MalformedHeader";
  case ErrorCode::BadMagic: return "BadMagic";
  case ErrorCode::CountMismatch: return "CountMismatch";
  case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorCode::MalformedRecord: return "MalformedRecord";
  case ErrorCode::UnexpectedEof: return "UnexpectedEof";
  case ErrorCode::MismatchedTag: return "MismatchedTag";
  case ErrorCode::BadAttribute: return "BadAttribute";
  case ErrorCode::ForbiddenConstruct: return "ForbiddenConstruct";
  case ErrorCode::XmlSyntax: return "XmlSyntax";
  case ErrorCode::SchemaError: return "SchemaError";
  case ErrorCode::IoFailure: return "IoFailure";
  case ErrorCode::BadRange: return "BadRange";
  case ErrorCode::EmptyBox: return "EmptyBox";
  case ErrorCode::OutOfBounds: return "OutOfBounds";
  case ErrorCode::DegeneratePlane: return "DegeneratePlane";
  case ErrorCode::SingularTransform: return "SingularTransform";
  case ErrorCode::NotClosed: return "NotClosed";
  case ErrorCode::InvalidMesh: return "InvalidMesh";
  case ErrorCode::InvalidMaterial: return "InvalidMaterial";
  case ErrorCode::InvalidSystem: return "InvalidSystem";
  case ErrorCode::NullspaceDetected: return "NullspaceDetected";
  case ErrorCode::InvertedElement: return "InvertedElement";
  case ErrorCode::SolverDiverged: return "SolverDiverged";
  case ErrorCode::NonFiniteState: return "NonFiniteState";
  case ErrorCode::LengthMismatch: return "LengthMismatch";
  case ErrorCode::EmptyReference: return "EmptyReference";
  case ErrorCode::BadGrid: return "BadGrid";
  case ErrorCode::GridMismatch: return "GridMismatch";
  case ErrorCode::EmptyLibrary: return "EmptyLibrary";
  case ErrorCode::ValidationFailed: return "ValidationFailed";
  case ErrorCode::NoSuchTransition: return "NoSuchTransition";
  case ErrorCode::AtFinalState: return "AtFinalState";
  case ErrorCode::TargetExists: return "TargetExists";
  case ErrorCode::BadIdentifier: return "BadIdentifier";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail,
                    std::optional<std::size_t> line) {
  std::string out{to_string(code)};
  if (line)
    out += " (line " + std::to_string(*line) + ")";
  if (!detail.empty())
    out += ": " + detail;
  return out;
}

} // namespace

Error::Error(ErrorCode code, std::string detail, std::optional<std::size_t> line)
  : std::runtime_error(compose(code, detail, line)),
    code_(code),
    detail_(std::move(detail)),
    line_(line) {
}

} // namespace camikit
