#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pinchlab {

enum class ErrorKind {
    Pole,
    PoleProximity,
    Domain,
    Convergence,
    Tolerance,
    InvalidInterval,
    Budget,
    Graph,
    Degeneracy,
    SingularMatrix,
    DecayHypothesis,
    Usage,
    Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace pinchlab
