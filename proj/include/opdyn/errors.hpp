#pragma once

#include <stdexcept>
#include <string>

namespace opdyn {

/// A map was applied outside the finite resolution of its argument
/// (odometer overflow, carry beyond the stored depth, window index outside
/// the representable segment).
class ResolutionError : public std::out_of_range {
public:
    explicit ResolutionError(const std::string& what) : std::out_of_range(what) {}
};

/// Malformed argument: mismatched depths, element outside a subgroup, bad parameter.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Request exceeds an exhaustive-enumeration or memory limit.
class LimitError : public std::length_error {
public:
    explicit LimitError(const std::string& what) : std::length_error(what) {}
};

} // namespace opdyn
