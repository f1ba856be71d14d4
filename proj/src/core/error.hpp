#pragma once

#include <stdexcept>
#include <string>

namespace scadatd {

// Error categories map 1:1 onto C API status codes and CLI exit codes.
enum class ErrorCode {
    invalid_argument,  // bad usage, bad config, contract violation
    data,              // malformed input, missing fields, schema mismatch
    numeric,           // solver failure, non-finite values
    io,                // file not found, unreadable, unwritable
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace scadatd
