#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace framelayout {

/// Malformed scene or layout document.
class SyntaxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed document that violates a scene invariant. `location` is a
/// JSON-pointer-like path such as "relations[3]".
class SemanticError : public std::runtime_error {
public:
    SemanticError(std::string location, const std::string& message)
        : std::runtime_error(location + ": " + message), location_(std::move(location)) {}

    const std::string& location() const { return location_; }

private:
    std::string location_;
};

class InfeasibleRoom : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t iteration, const std::string& message)
        : std::runtime_error("diverged at iteration " + std::to_string(iteration) + ": " + message),
          iteration_(iteration) {}

    std::size_t iteration() const { return iteration_; }

private:
    std::size_t iteration_;
};

class RevisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Unreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace framelayout
