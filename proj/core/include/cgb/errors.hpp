#pragma once

#include <stdexcept>
#include <string>

namespace cgb {

/// Structural misuse of the API or malformed input: scene syntax, unknown
/// variables, out-of-range axes, mismatched jet shapes. CLI exit code 2.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runtime evaluation failure: singular metric, degenerate corner angle,
/// analytic-function domain violation, internal oracle mismatch.
/// CLI exit code 3.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cgb
