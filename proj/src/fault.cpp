#include "aisim/fault.hpp"

#include "aisim/error.hpp"

#include <cmath>
#include <string>

namespace aisim {

void validate(const Fault& fault, const Grid& grid) {
    if (fault.node >= grid.size()) {
        throw Error("fault node " + std::to_string(fault.node) + " does not exist");
    }
    if (!std::isfinite(fault.delta_P) || fault.delta_P == 0.0) {
        throw Error("fault delta_P must be finite and non-zero");
    }
    if (!std::isfinite(fault.time)) throw Error("fault time must be finite");
}

std::vector<double> post_fault_injections(const Grid& grid, const Fault& fault) {
    std::vector<double> p(grid.size());
    for (const Node& n : grid.nodes()) p[n.id] = n.P;
    p.at(fault.node) += fault.delta_P;
    return p;
}

}  // namespace aisim
