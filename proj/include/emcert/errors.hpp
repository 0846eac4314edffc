#pragma once

#include <stdexcept>
#include <string>

namespace emcert {

// Bad input or violated precondition (dimension mismatch, malformed file,
// target outside hull, ...). The CLI maps these to exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested target is not reachable by any convex combination of the
// grid points. Kept separate from InputError so callers can distinguish
// "outside hull" from ordinary bad input.
struct HullError : InputError {
    explicit HullError(const std::string& msg) : InputError(msg) {}
};

// Simplex iteration cap exceeded. Exit code 1 (internal) in the CLI.
struct SolverStalled : std::runtime_error {
    explicit SolverStalled(const std::string& msg) : std::runtime_error(msg) {}
};

// A postcondition that the mathematics guarantees failed to hold, which
// indicates a defect in the solver rather than in the input.
struct InternalError : std::runtime_error {
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace emcert
