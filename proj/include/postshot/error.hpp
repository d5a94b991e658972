#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace postshot {

enum class ErrorCode {
  // ocr
  EngineNotFound,
  EngineFailure,
  UnreadableImage,
  FileNotFound,
  InvalidEncoding,
  // metadata
  EmptyWordlist,
  MentionOutOfRange,
  InvalidConfig,
  // query
  EmptyBody,
  // eval
  NoSupportedClasses,
  IdMismatch,
  EmptyInput,
  MissingAnnotation,
  // corpus
  MalformedUrl,
  MissingAccount,
  UnsupportedPlatform,
  SchemaViolation,
  // fixtures
  InconsistentSpec,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `line` is 1-based where a file
/// position is meaningful (URL lists, JSONL records); `field` names the
/// offending record field for schema errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt, std::string field = {});

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string field_;
};

}  // namespace postshot
