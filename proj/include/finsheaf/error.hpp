#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace finsheaf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input or a violated precondition (bad schema, non-prime p, ...).
class InputError : public Error {
public:
    using Error::Error;
};

/// A structure failed its axiom check. `witness()` names the offending
/// indices so the failure can be replayed.
class AxiomError : public Error {
public:
    AxiomError(const std::string& what, nlohmann::json witness)
        : Error(what), witness_(std::move(witness)) {}

    const nlohmann::json& witness() const noexcept { return witness_; }

private:
    nlohmann::json witness_;
};

/// An exhaustive search ran past its node budget. Never confused with an
/// empty result.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::uint64_t budget)
        : Error(what + " (budget " + std::to_string(budget) + ")"), budget_(budget) {}

    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t budget_;
};

/// Search and materialization limits shared by the checkers.
struct Budget {
    std::uint64_t sieve_nodes = 1'000'000;   ///< sieve enumeration nodes
    std::uint64_t nat_nodes = 1'000'000;     ///< natural-transformation search nodes
    std::size_t materialize_cap = 10'000;    ///< max elements of a module value as a set
};

}  // namespace finsheaf
