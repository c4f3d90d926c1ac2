#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace permfree {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two operands disagree on side length or word length.
class SizeMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed input: non-bijective tables, bad ranges, unparsable specs.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A scheme was asked to build at a side length it does not support.
class InadmissibleSize : public Error {
public:
    using Error::Error;
};

/// Exact evaluation would exceed the configured amount of work.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(std::string const& what, std::uint64_t budget, std::uint64_t required)
        : Error(what), budget_(budget), required_(required) {}

    std::uint64_t budget() const noexcept { return budget_; }
    /// Naive upper bound on the work the call needs ((m-1)!! * N^m).
    std::uint64_t required() const noexcept { return required_; }

private:
    std::uint64_t budget_;
    std::uint64_t required_;
};

inline void require_same_side(int a, int b, char const* where) {
    if (a != b) {
        throw SizeMismatch(std::string(where) + ": side lengths differ (" + std::to_string(a) +
                           " vs " + std::to_string(b) + ")");
    }
}

} // namespace permfree
