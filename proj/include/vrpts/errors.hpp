#pragma once

#include <stdexcept>
#include <string>

namespace vrpts {

// Malformed instance or solution text. `line()` is 1-based, 0 when the
// problem is not tied to a single line (e.g. a missing section).
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) { }

    int line() const { return line_; }

private:
    int line_;
};

// A solution or move that violates structural invariants (coverage,
// depot anchoring, index ranges).
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke an API precondition, e.g. evaluated against stale
// attribute data or requested reversal on a time-windowed instance.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace vrpts
