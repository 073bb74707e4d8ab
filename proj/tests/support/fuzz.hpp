#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diffuseslide/remote/protocol.hpp"

namespace dslide::testing {

// A byte stream that is not a valid reply to `request`, followed by EOF.
// Every variant is malformed by construction (bad framing, bad body, wrong
// id, wrong dims, non-finite data, wrong type, truncation, ...).
std::vector<std::uint8_t> malformed_reply(std::uint64_t& rng_state, const remote::DenoiseRequest& request,
                                          std::string* variant = nullptr);

struct FuzzOutcome {
    std::size_t cases = 0;
    std::size_t protocol_errors = 0;
    // Error kind name (or "success", "other-exception") -> count for anything else.
    std::map<std::string, std::size_t> unexpected;
};

// Feeds `cases` malformed replies to a client connection over socket pairs.
FuzzOutcome fuzz_client(std::size_t cases, std::uint64_t seed);

// Sends `cases` malformed client streams to a live server. Returns the number
// of cases where the server answered with a well-formed ERROR frame or
// closed the connection; anything else is counted as a failure.
struct ServerFuzzOutcome {
    std::size_t cases = 0;
    std::size_t handled = 0;
};
ServerFuzzOutcome fuzz_server(const std::string& address, std::size_t cases, std::uint64_t seed);

}  // namespace dslide::testing
