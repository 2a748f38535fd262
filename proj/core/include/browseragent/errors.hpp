#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace browseragent {

enum class ErrorCode {
  NodeNotFound,
  SessionTerminated,
  NavigationError,
  BadParameter,
  ManifestError,
  MissingFile,
  CapacityExceeded,
  ParseError,
  SchemaError,
  IOError,
  QuotaError,
  ConfigError,
  LLMError,
  ServerError,
};

std::string_view to_string(ErrorCode code);

/// Domain error carrying a stable code; what() is "<Code>: <message>".
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &message);
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace browseragent
