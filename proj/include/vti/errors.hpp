#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vti {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when the massless-dof stiffness block cannot be factorized,
// i.e. there is a mechanism among the dofs listed in `dofs`.
struct SingularBlockError : ModelError {
    std::vector<int> dofs;
    SingularBlockError(const std::string& msg, std::vector<int> d)
        : ModelError(msg), dofs(std::move(d)) {}
};

struct OutOfRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleTargetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite state (or runaway displacement) during time integration.
struct DivergenceError : std::runtime_error {
    long step;
    DivergenceError(const std::string& msg, long step_index)
        : std::runtime_error(msg), step(step_index) {}
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    long step;
    ConvergenceError(const std::string& msg, long step_index)
        : std::runtime_error(msg), step(step_index) {}
};

}  // namespace vti
