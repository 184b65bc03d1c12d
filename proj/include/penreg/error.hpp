#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace penreg {

/// Invalid argument or precondition violation on user-facing input.
class InvalidInput : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A design (or sub-design) is not of full column rank.
class RankDeficientError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver stopped without meeting its tolerance. Path solvers
/// attach the grid index where it happened.
class ConvergenceError : public std::runtime_error
{
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}

    ConvergenceError(const std::string& what, std::size_t grid_index)
        : std::runtime_error(what + " (grid index " + std::to_string(grid_index) + ")"),
          grid_index_(grid_index)
    {}

    std::optional<std::size_t> grid_index() const noexcept { return grid_index_; }

private:
    std::optional<std::size_t> grid_index_;
};

}  // namespace penreg
