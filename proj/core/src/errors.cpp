#include "browseragent/errors.hpp"

namespace browseragent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::NodeNotFound: return "NodeNotFound";
  case ErrorCode::SessionTerminated: return "SessionTerminated";
  case ErrorCode::NavigationError: return "NavigationError";
  case ErrorCode::BadParameter: return "BadParameter";
  case ErrorCode::ManifestError: return "ManifestError";
  case ErrorCode::MissingFile: return "MissingFile";
  case ErrorCode::CapacityExceeded: return "CapacityExceeded";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::SchemaError: return "SchemaError";
  case ErrorCode::IOError: return "IOError";
  case ErrorCode::QuotaError: return "QuotaError";
  case ErrorCode::ConfigError: return "ConfigError";
  case ErrorCode::LLMError: return "LLMError";
  case ErrorCode::ServerError: return "ServerError";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace browseragent
