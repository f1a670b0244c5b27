#pragma once

#include <stdexcept>
#include <string>

namespace fabric {

/// Transformed node spacing collapsed below machine tolerance.
struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A solver or grid configuration rejected before any stepping happens
/// (stability violation, under-resolved grid, singular-cell Peclet bound).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fabric
