#pragma once

#include <stdexcept>
#include <string>

namespace maillet {

// Precondition violations (bad ranges, malformed input) are reported as
// std::invalid_argument. DomainError covers operations that were asked a
// well-formed question they cannot answer: memory caps, 64-bit overflow,
// exhausted searches.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverflowError : public DomainError {
public:
    explicit OverflowError(const std::string& what)
        : DomainError("64-bit overflow: " + what) {}
};

} // namespace maillet
