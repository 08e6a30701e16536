#pragma once

#include <stdexcept>
#include <string>

namespace ethos {

enum class ErrorKind {
    Parse,            // malformed document text
    Schema,           // well-formed text with the wrong shape or types
    Validation,       // scenario invariants violated (see ValidationError)
    UnknownId,        // reference to a dictum/prescript/action that does not exist
    Mismatch,         // shape or id-ordering mismatch between artifacts
    InvalidArgument,  // out-of-range parameter
    TooLarge,         // input exceeds an exhaustive-check bound
    Io,               // filesystem failure
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace ethos
