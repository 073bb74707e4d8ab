#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dslide {

enum class ErrorKind {
    InvalidArgument,
    InvalidState,
    NumericalFailure,
    WindowTooLong,
    ConstructionFailure,
    FormatError,
    Unsupported,
    TransportError,
    ProtocolError,
    RemoteDenoiserError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so
// callers (and the CLI's --json error output) can dispatch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

    // Same kind, message prefixed with `context`.
    Error with_context(std::string_view context) const;

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace dslide
