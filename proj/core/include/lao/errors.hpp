#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lao {

/// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a function (out-of-range index, non-finite value, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration or a violated algorithm precondition.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Thrown by a capped BudgetLedger when a charge would overrun its cap.
/// The ledger is left unchanged.
class BudgetExhausted : public Error {
public:
    BudgetExhausted(std::uint64_t cap, std::uint64_t requested_total)
        : Error("attribute budget of " + std::to_string(cap) +
                " would be exceeded (requested total " + std::to_string(requested_total) + ")"),
          cap_(cap) {}

    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t cap_;
};

} // namespace lao
