#pragma once

#include <stdexcept>
#include <string>

namespace snbohm {

// Base class for everything this library throws.
class SnError : public std::runtime_error {
public:
    explicit SnError(const std::string& msg) : std::runtime_error(msg) {}
};

// Precondition / contract violations (bad grids, unnormalized states, ...).
class ContractError : public SnError {
public:
    explicit ContractError(const std::string& msg) : SnError(msg) {}
};

// Runtime numerical failures (non-convergence, norm drift, constraint drift).
class NumericalError : public SnError {
public:
    explicit NumericalError(const std::string& msg) : SnError(msg) {}
};

// 1 + Q <= 0 in the relativistic dispersion relation.
class TachyonicError : public NumericalError {
public:
    explicit TachyonicError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace snbohm
