#pragma once

#include <stdexcept>
#include <string>

namespace spinorsurf {

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// compatibility condition of an elliptic solve failed
struct IncompatibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFloquetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConformalityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedGridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace spinorsurf
