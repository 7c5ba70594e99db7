#pragma once

#include "aisim/grid.hpp"

#include <span>
#include <vector>

namespace aisim {

/// Net power leaving each node, flow_i = sum_j b_ij sin(theta_i - theta_j).
/// `line_scratch` must hold one entry per line.
void node_flows(const Grid& grid, std::span<const double> theta, std::span<double> flow,
                std::span<double> line_scratch);

/// Convenience overload that allocates.
[[nodiscard]] std::vector<double> node_flows(const Grid& grid, std::span<const double> theta);

}  // namespace aisim
