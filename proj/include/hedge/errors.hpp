#pragma once

#include <stdexcept>
#include <string>

namespace hedge {

// Error taxonomy. Each family maps to a distinct process exit code in the
// CLI (config -> 2, data -> 3, training -> 4), so keep the hierarchy flat
// and catchable by base type.

// Invalid or inconsistent configuration (bad keys, out-of-range values,
// infeasible experiment plans).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Problems with market data: unreadable files, malformed rows, calendar
// misalignment beyond repair, non-positive prices.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during optimization (non-finite gradients or rewards).
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor shape mismatch in graph construction.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Operation applied outside its mathematical domain (empty reductions,
// too-short windows).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Lookup outside the available history (not enough trailing data for a
// window or lag).
struct RangeError : std::out_of_range {
    explicit RangeError(const std::string& msg) : std::out_of_range(msg) {}
};

// Non-finite values where finite ones are required.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// API misuse: violated preconditions between modules (unsorted decisions,
// double backward, exposure above the cap). These indicate bugs, not bad
// user input.
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace hedge
