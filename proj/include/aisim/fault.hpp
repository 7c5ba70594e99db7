#pragma once

#include "aisim/grid.hpp"

#include <cstddef>
#include <vector>

namespace aisim {

/// Step change of the active power injected at one node, applied at `time`.
struct Fault {
    std::size_t node = 0;
    double delta_P = 0.0;
    double time = 0.0;
};

/// Throws aisim::Error if the node does not exist or delta_P is zero/non-finite.
void validate(const Fault& fault, const Grid& grid);

/// Injections after the step: P with P[fault.node] += delta_P.
[[nodiscard]] std::vector<double> post_fault_injections(const Grid& grid, const Fault& fault);

}  // namespace aisim
