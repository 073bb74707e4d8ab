#include "diffuseslide/errors.hpp"

namespace dslide {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::InvalidState: return "invalid-state";
        case ErrorKind::NumericalFailure: return "numerical-failure";
        case ErrorKind::WindowTooLong: return "window-too-long";
        case ErrorKind::ConstructionFailure: return "construction-failure";
        case ErrorKind::FormatError: return "format-error";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::TransportError: return "transport-error";
        case ErrorKind::ProtocolError: return "protocol-error";
        case ErrorKind::RemoteDenoiserError: return "remote-denoiser-error";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

Error Error::with_context(std::string_view context) const {
    std::string msg(context);
    msg += ": ";
    msg += what();
    return Error(kind_, msg);
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace dslide
