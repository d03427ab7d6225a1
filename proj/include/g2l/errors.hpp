#pragma once

#include <stdexcept>
#include <string>

namespace g2l {

/// Raised when input data violates a documented precondition or invariant
/// (bad matrices, ragged files, dimension mismatches, invalid parameters).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace g2l
