#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace camikit {

/// Every failure raised by the library carries one of these codes. The CLI
/// and the HTTP layer map codes to exit statuses and response codes.
enum class ErrorCode {
  // kernel
  DuplicateId,
  MalformedManifest,
  NoHandlerForSuffix,
  UnknownAction,
  KindMismatch,
  ParamValidation,
  ActionFailure,
  UnresolvedBinding,
  MalformedPipeline,
  UnknownId,
  // formats
  MissingKey,
  UnsupportedElementType,
  PayloadSizeMismatch,
  MalformedHeader,
  BadMagic,
  CountMismatch,
  IndexOutOfRange,
  MalformedRecord,
  UnexpectedEof,
  MismatchedTag,
  BadAttribute,
  ForbiddenConstruct,
  XmlSyntax,
  SchemaError,
  IoFailure,
  // imaging
  BadRange,
  EmptyBox,
  OutOfBounds,
  DegeneratePlane,
  // mesh
  SingularTransform,
  NotClosed,
  InvalidMesh,
  // biomech
  InvalidMaterial,
  InvalidSystem,
  NullspaceDetected,
  InvertedElement,
  SolverDiverged,
  NonFiniteState,
  LengthMismatch,
  EmptyReference,
  BadGrid,
  GridMismatch,
  EmptyLibrary,
  // protocol
  ValidationFailed,
  NoSuchTransition,
  AtFinalState,
  // wizard
  TargetExists,
  BadIdentifier,
  // generic
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string detail,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

  /// 1-based line number for text parsers, when the grammar has one.
  std::optional<std::size_t> line() const noexcept { return line_; }

private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> line_;
};

} // namespace camikit
