#include "postshot/error.hpp"

namespace postshot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EngineNotFound: return "EngineNotFound";
    case ErrorCode::EngineFailure: return "EngineFailure";
    case ErrorCode::UnreadableImage: return "UnreadableImage";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::InvalidEncoding: return "InvalidEncoding";
    case ErrorCode::EmptyWordlist: return "EmptyWordlist";
    case ErrorCode::MentionOutOfRange: return "MentionOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::EmptyBody: return "EmptyBody";
    case ErrorCode::NoSupportedClasses: return "NoSupportedClasses";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingAnnotation: return "MissingAnnotation";
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::MissingAccount: return "MissingAccount";
    case ErrorCode::UnsupportedPlatform: return "UnsupportedPlatform";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InconsistentSpec: return "InconsistentSpec";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line,
             std::string field)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      line_(line),
      field_(std::move(field)) {}

}  // namespace postshot
