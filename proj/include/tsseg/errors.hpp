#ifndef TSSEG_ERRORS_HPP
#define TSSEG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tsseg {

// Malformed or unusable input data (files, shapes, non-numeric cells).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data-driven numerical failure: singular covariance, degenerate variance,
// ill-conditioned regression.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated an operation's contract (bad lag range, asymmetric matrix,
// mismatched ranks). Distinct from NumericError so callers can tell misuse
// apart from hard data.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace tsseg

#endif  // TSSEG_ERRORS_HPP
