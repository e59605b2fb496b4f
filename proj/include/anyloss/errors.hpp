#pragma once

#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace anyloss {

/// Argument outside the mathematical domain of a function (non-finite input,
/// probability outside [0,1], accuracy level outside (0,0.5), ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a precondition: mismatched lengths, empty input, bad shapes.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A class-ratio metric was asked for a gradient on a batch that lacks one class.
class DegenerateClassError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline WarningHandler& warning_handler() {
    static WarningHandler handler = [](const std::string& msg) {
        std::cerr << "anyloss: warning: " << msg << '\n';
    };
    return handler;
}
}  // namespace detail

/// Replace the process-wide warning sink; returns the previous one.
inline WarningHandler set_warning_handler(WarningHandler handler) {
    return std::exchange(detail::warning_handler(), std::move(handler));
}

inline void warn(const std::string& msg) {
    if (auto& h = detail::warning_handler()) h(msg);
}

}  // namespace anyloss
