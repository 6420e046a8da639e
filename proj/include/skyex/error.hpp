#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace skyex {

enum class ErrorCode {
    not_found,
    conflict,
    contract_violation,
    parse_error,
    config_error,
    capacity,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Where in the input an ingest or config error was detected.
struct ErrorLocation {
    std::optional<std::size_t> row = std::nullopt;
    std::optional<std::size_t> column = std::nullopt;
    std::optional<std::string> attribute = std::nullopt;
};

/// The single exception type thrown by the library. Every failure maps to
/// exactly one ErrorCode, which the service layer turns into an API error.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, ErrorLocation location = {})
        : std::runtime_error(message), code_(code), location_(std::move(location)) {}

    ErrorCode code() const noexcept { return code_; }
    const ErrorLocation& location() const noexcept { return location_; }

private:
    ErrorCode code_;
    ErrorLocation location_;
};

[[noreturn]] inline void contract_violation(const std::string& message) {
    throw Error(ErrorCode::contract_violation, message);
}

inline void require(bool condition, const char* message) {
    if (!condition) contract_violation(message);
}

}  // namespace skyex
